use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::color::{apply_gamma, apply_hsv_shift, apply_overlay};
use super::{AugmentationConfig, HsvJitter};
use crate::error::{Error, Result};
use crate::image::RgbImage;

/// Generator for one mechanism on one frame.
pub fn stage_rng(seed: u64, frame_index: u64, mechanism_id: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&frame_index.to_le_bytes());
    key[16..24].copy_from_slice(&mechanism_id.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Sampled parameters of one stage, tagged by stage name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "lowercase")]
pub enum StageParams {
    Overlay { image_index: usize, weight: f64 },
    Hsv { hue_deg: f64, saturation: f64, value: f64 },
    Gamma { gamma: f64 },
}

impl StageParams {
    pub fn stage_name(&self) -> &'static str {
        match self {
            StageParams::Overlay { .. } => "overlay",
            StageParams::Hsv { .. } => "hsv",
            StageParams::Gamma { .. } => "gamma",
        }
    }
}

pub trait AugmentStage: Send + Sync {
    fn name(&self) -> &'static str;
    /// Key component of the stage's random stream.
    fn mechanism_id(&self) -> u64;
    /// `None` when the config disables the stage.
    fn sample(&self, config: &AugmentationConfig, overlay_count: usize, frame_index: u64,
              rng: &mut ChaCha8Rng) -> Option<StageParams>;
    fn apply(&self, image: RgbImage, params: &StageParams, overlays: &[RgbImage]) -> Result<RgbImage>;
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

pub(super) fn sample_hsv(j: &HsvJitter, rng: &mut impl Rng) -> [f64; 3] {
    [
        uniform(rng, -j.hue_deg, j.hue_deg),
        uniform(rng, -j.saturation, j.saturation),
        uniform(rng, -j.value, j.value),
    ]
}

fn mismatch(stage: &str, p: &StageParams) -> Error {
    Error::validation(format!("stage '{stage}' cannot apply {} parameters", p.stage_name()))
}

pub struct OverlayStage;

impl AugmentStage for OverlayStage {
    fn name(&self) -> &'static str {
        "overlay"
    }

    fn mechanism_id(&self) -> u64 {
        1
    }

    fn sample(&self, config: &AugmentationConfig, overlay_count: usize, frame_index: u64,
              rng: &mut ChaCha8Rng) -> Option<StageParams> {
        let o = config.overlay.as_ref()?;
        let n = overlay_count.max(1) as u64;
        Some(StageParams::Overlay {
            image_index: (frame_index % n) as usize,
            weight: uniform(rng, o.weight_range[0], o.weight_range[1]),
        })
    }

    fn apply(&self, image: RgbImage, params: &StageParams, overlays: &[RgbImage]) -> Result<RgbImage> {
        let StageParams::Overlay { image_index, weight } = *params else {
            return Err(mismatch(self.name(), params));
        };
        let ov = overlays.get(image_index).ok_or_else(|| {
            Error::validation(format!("overlay frame {image_index} not loaded ({} available)", overlays.len()))
        })?;
        Ok(apply_overlay(&image, ov, weight))
    }
}

pub struct HsvStage;

impl AugmentStage for HsvStage {
    fn name(&self) -> &'static str {
        "hsv"
    }

    fn mechanism_id(&self) -> u64 {
        2
    }

    fn sample(&self, config: &AugmentationConfig, _: usize, _: u64, rng: &mut ChaCha8Rng) -> Option<StageParams> {
        let [hue_deg, saturation, value] = sample_hsv(config.hsv_jitter.as_ref()?, rng);
        Some(StageParams::Hsv { hue_deg, saturation, value })
    }

    fn apply(&self, image: RgbImage, params: &StageParams, _: &[RgbImage]) -> Result<RgbImage> {
        let StageParams::Hsv { hue_deg, saturation, value } = *params else {
            return Err(mismatch(self.name(), params));
        };
        Ok(apply_hsv_shift(&image, hue_deg, saturation, value))
    }
}

pub struct GammaStage;

impl AugmentStage for GammaStage {
    fn name(&self) -> &'static str {
        "gamma"
    }

    fn mechanism_id(&self) -> u64 {
        3
    }

    fn sample(&self, config: &AugmentationConfig, _: usize, _: u64, rng: &mut ChaCha8Rng) -> Option<StageParams> {
        let [lo, hi] = config.gamma_range?;
        Some(StageParams::Gamma { gamma: uniform(rng, lo, hi) })
    }

    fn apply(&self, image: RgbImage, params: &StageParams, _: &[RgbImage]) -> Result<RgbImage> {
        let StageParams::Gamma { gamma } = *params else {
            return Err(mismatch(self.name(), params));
        };
        Ok(apply_gamma(&image, gamma))
    }
}

/// Stages in application order.
pub struct StageRegistry {
    stages: Vec<Box<dyn AugmentStage>>,
}

impl Default for StageRegistry {
    fn default() -> Self {
        Self {
            stages: vec![Box::new(OverlayStage), Box::new(HsvStage), Box::new(GammaStage)],
        }
    }
}

impl StageRegistry {
    /// Appends a stage after the built-in ones; names must be unique.
    pub fn register(&mut self, stage: Box<dyn AugmentStage>) -> Result<()> {
        if self.stages.iter().any(|s| s.name() == stage.name()) {
            return Err(Error::validation(format!("stage '{}' already registered", stage.name())));
        }
        self.stages.push(stage);
        Ok(())
    }

    pub fn stages(&self) -> &[Box<dyn AugmentStage>] {
        &self.stages
    }

    pub fn get(&self, name: &str) -> Result<&dyn AugmentStage> {
        self.stages
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "augmentation stage",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.stages.iter().map(|s| s.name()).collect()
    }
}

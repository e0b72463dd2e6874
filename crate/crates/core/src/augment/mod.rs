//! Image-space randomization: overlay blending, HSV jitter and gamma.
//!
//! Stages run in a fixed order (overlay, HSV, gamma). Each stage draws its
//! parameters from a generator keyed by `(seed, frame_index, mechanism id)`,
//! so any frame can be reproduced on its own.

mod color;
mod stages;

pub use color::{apply_gamma, apply_hsv_shift, apply_overlay, hsv_to_rgb, rgb_to_hsv};
pub use stages::{
    stage_rng, AugmentStage, GammaStage, HsvStage, OverlayStage, StageParams, StageRegistry,
};

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::RgbImage;
use crate::io::read_rgb_image;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    /// Overlay frames, cycled by frame index.
    pub images: Vec<PathBuf>,
    /// Blend weight drawn uniformly from `[lo, hi]` ⊂ [0, 1].
    pub weight_range: [f64; 2],
}

/// Half-ranges of the uniform HSV offsets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsvJitter {
    pub hue_deg: f64,
    pub saturation: f64,
    pub value: f64,
}

impl Default for HsvJitter {
    fn default() -> Self {
        Self {
            hue_deg: 10.0,
            saturation: 0.1,
            value: 0.1,
        }
    }
}

pub const DEFAULT_GAMMA_RANGE: [f64; 2] = [0.7, 1.5];

/// A mechanism is disabled when its field is `null`. Omitted HSV and gamma
/// fields take the defaults; an omitted overlay is disabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationConfig {
    #[serde(default)]
    pub overlay: Option<OverlayConfig>,
    #[serde(default = "default_hsv")]
    pub hsv_jitter: Option<HsvJitter>,
    #[serde(default = "default_gamma")]
    pub gamma_range: Option<[f64; 2]>,
    #[serde(default)]
    pub seed: u64,
}

fn default_hsv() -> Option<HsvJitter> {
    Some(HsvJitter::default())
}

fn default_gamma() -> Option<[f64; 2]> {
    Some(DEFAULT_GAMMA_RANGE)
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            overlay: None,
            hsv_jitter: default_hsv(),
            gamma_range: default_gamma(),
            seed: 0,
        }
    }
}

impl AugmentationConfig {
    pub fn disabled(seed: u64) -> Self {
        Self {
            overlay: None,
            hsv_jitter: None,
            gamma_range: None,
            seed,
        }
    }

    pub fn is_disabled(&self) -> bool {
        self.overlay.is_none() && self.hsv_jitter.is_none() && self.gamma_range.is_none()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::format(format!("augmentation config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(o) = &self.overlay {
            let [lo, hi] = o.weight_range;
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::validation(format!(
                    "overlay weight range [{lo}, {hi}] must be ordered inside [0, 1]"
                )));
            }
            if o.images.is_empty() {
                return Err(Error::validation("overlay needs at least one image"));
            }
        }
        if let Some(j) = &self.hsv_jitter {
            let ok = [j.hue_deg, j.saturation, j.value]
                .iter()
                .all(|v| v.is_finite() && *v >= 0.0);
            if !ok {
                return Err(Error::validation("hsv half-ranges must be finite and non-negative"));
            }
        }
        if let Some([lo, hi]) = self.gamma_range {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::validation(format!(
                    "gamma range [{lo}, {hi}] must satisfy 0 < lo <= hi"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters actually applied to one frame; enough to replay it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    pub frame_index: u64,
    pub stages: Vec<StageParams>,
}

/// A validated config with its overlay frames decoded.
pub struct Augmenter {
    config: AugmentationConfig,
    overlays: Vec<RgbImage>,
    stages: StageRegistry,
}

impl Augmenter {
    pub fn new(config: AugmentationConfig) -> Result<Self> {
        config.validate()?;
        let overlays = match &config.overlay {
            Some(o) => o.images.iter().map(|p| read_rgb_image(p)).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Ok(Self {
            config,
            overlays,
            stages: StageRegistry::default(),
        })
    }

    /// Uses already decoded overlay frames instead of the config's paths.
    pub fn with_overlays(config: AugmentationConfig, overlays: Vec<RgbImage>) -> Result<Self> {
        config.validate()?;
        if config.overlay.is_some() && overlays.is_empty() {
            return Err(Error::validation("overlay enabled without overlay frames"));
        }
        Ok(Self {
            config,
            overlays,
            stages: StageRegistry::default(),
        })
    }

    pub fn config(&self) -> &AugmentationConfig {
        &self.config
    }

    pub fn sample(&self, frame_index: u64) -> FrameParams {
        let stages = self
            .stages
            .stages()
            .iter()
            .filter_map(|s| {
                let mut rng = stage_rng(self.config.seed, frame_index, s.mechanism_id());
                s.sample(&self.config, self.overlays.len(), frame_index, &mut rng)
            })
            .collect();
        FrameParams {
            frame_index,
            stages,
        }
    }

    /// Applies recorded parameters; independent of the config's ranges and seed.
    pub fn replay(&self, image: &RgbImage, params: &FrameParams) -> Result<RgbImage> {
        let mut out = image.clone();
        for p in &params.stages {
            let stage = self.stages.get(p.stage_name())?;
            out = stage.apply(out, p, &self.overlays)?;
        }
        Ok(out)
    }

    pub fn augment(&self, image: &RgbImage, frame_index: u64) -> Result<(RgbImage, FrameParams)> {
        let params = self.sample(frame_index);
        let out = self.replay(image, &params)?;
        Ok((out, params))
    }
}

/// One-shot convenience: overlay → HSV jitter → gamma for `frame_index`.
pub fn augment(image: &RgbImage, config: &AugmentationConfig, frame_index: u64) -> Result<RgbImage> {
    Augmenter::new(config.clone())?.augment(image, frame_index).map(|(img, _)| img)
}

/// Random HSV jitter with offsets drawn uniformly from the half-ranges.
pub fn apply_hsv_jitter(image: &RgbImage, jitter: &HsvJitter, rng: &mut impl Rng) -> RgbImage {
    let [dh, ds, dv] = stages::sample_hsv(jitter, rng);
    apply_hsv_shift(image, dh, ds, dv)
}

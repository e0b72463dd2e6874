use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{NodeKind, PoseDoc};

/// Scene manifest document. Asset paths are relative to the manifest file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub sensors: Vec<SensorDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub kind: NodeKind,
    /// Splat PLY holding the node's primitives in node-local coordinates.
    pub splat: PathBuf,
    /// Optional physics twin (OBJ/STL).
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    #[serde(default)]
    pub pose: PoseDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SensorDoc {
    Camera {
        id: String,
        /// Node the sensor rides on; world-fixed when absent.
        #[serde(default)]
        parent: Option<String>,
        /// Sensor → parent, camera axes x right, y down, z forward.
        #[serde(default)]
        mount: PoseDoc,
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
        #[serde(default = "default_near")]
        near: f64,
        #[serde(default = "default_far")]
        far: f64,
    },
    Lidar {
        id: String,
        #[serde(default)]
        parent: Option<String>,
        /// Sensor → parent, sensor axes x forward, z up.
        #[serde(default)]
        mount: PoseDoc,
        /// Explicit elevations; otherwise an even fan from the three fields below.
        #[serde(default)]
        channels_deg: Option<Vec<f64>>,
        #[serde(default)]
        channel_count: Option<usize>,
        #[serde(default)]
        min_elevation_deg: Option<f64>,
        #[serde(default)]
        max_elevation_deg: Option<f64>,
        azimuth_step_deg: f64,
        max_range: f64,
        #[serde(default = "default_alpha_threshold")]
        alpha_threshold: f64,
    },
}

fn default_near() -> f64 {
    0.01
}
fn default_far() -> f64 {
    1000.0
}
fn default_alpha_threshold() -> f64 {
    0.5
}

impl SensorDoc {
    pub fn id(&self) -> &str {
        match self {
            SensorDoc::Camera { id, .. } | SensorDoc::Lidar { id, .. } => id,
        }
    }
}

impl SceneManifest {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(format!("scene manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

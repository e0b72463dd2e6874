use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::RigidTransform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Background,
    Interactive,
}

/// A background or pose-driven entity owning a primitive range.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneNode {
    pub id: String,
    pub kind: NodeKind,
    /// Node-local → world.
    pub pose: RigidTransform,
    pub range: Range<usize>,
}

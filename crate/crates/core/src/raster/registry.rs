use std::collections::BTreeMap;
use std::sync::Arc;

use super::brute::BruteForceRasterizer;
use super::camera::CameraModel;
use super::project::ProjectedSplat;
use super::target::RenderTarget;
use super::tiled::TiledRasterizer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RasterOptions {
    /// Divide composited depth by accumulated alpha.
    pub normalize_depth: bool,
}

/// A backend that composites projected splats into a [`RenderTarget`].
pub trait Rasterizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn rasterize(&self, splats: &[ProjectedSplat], camera: &CameraModel, opts: &RasterOptions) -> RenderTarget;
}

/// Rasterizer backends by name.
#[derive(Clone)]
pub struct RasterizerRegistry {
    entries: BTreeMap<&'static str, Arc<dyn Rasterizer>>,
}

impl Default for RasterizerRegistry {
    fn default() -> Self {
        let mut r = Self {
            entries: BTreeMap::new(),
        };
        r.register(Arc::new(TiledRasterizer));
        r.register(Arc::new(BruteForceRasterizer));
        r
    }
}

impl RasterizerRegistry {
    pub fn register(&mut self, backend: Arc<dyn Rasterizer>) {
        self.entries.insert(backend.name(), backend);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Rasterizer>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::Unknown {
            kind: "rasterizer",
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

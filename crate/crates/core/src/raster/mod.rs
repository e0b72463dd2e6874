//! Tile-based splat rasterization producing RGB, depth and alpha images.

mod blend;
mod brute;
mod camera;
mod project;
mod registry;
pub mod sh;
mod target;
mod tiled;

use rayon::prelude::*;

pub use blend::{composite_pixel, BlendSplat, PixelAccum, PixelOut, ALPHA_MAX, ALPHA_MIN, TRANSMITTANCE_MIN};
pub use brute::{BruteForceRasterizer, PixelWindow};
pub use camera::{CameraModel, MIN_IMAGE_SIDE};
pub use project::{project, project_covariance, ProjectedSplat, EXTENT_SIGMA, LOW_PASS_FLOOR};
pub use registry::{RasterOptions, Rasterizer, RasterizerRegistry};
pub use sh::shade_sh;
pub use target::RenderTarget;
pub use tiled::{TiledRasterizer, TILE_SIZE};

use crate::types::{GaussianField, NodePoses};

/// Projects and rasterizes one camera.
pub fn render_view(
    field: &GaussianField,
    poses: &NodePoses,
    camera: &CameraModel,
    backend: &dyn Rasterizer,
    opts: &RasterOptions,
) -> RenderTarget {
    let splats = project(field, poses, camera);
    backend.rasterize(&splats, camera, opts)
}

/// Renders each camera independently; output order follows `cameras`.
pub fn render_views(
    field: &GaussianField,
    poses: &NodePoses,
    cameras: &[CameraModel],
    backend: &dyn Rasterizer,
    opts: &RasterOptions,
) -> Vec<RenderTarget> {
    cameras
        .par_iter()
        .map(|c| render_view(field, poses, c, backend, opts))
        .collect()
}

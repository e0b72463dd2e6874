use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::raster::{render_view, CameraModel, RasterOptions, TiledRasterizer};
use crate::types::{GaussianField, NodePoses};

/// Elevation rings of the fusion camera sphere, degrees.
pub const RING_ELEVATIONS_DEG: [f64; 3] = [-30.0, 0.0, 30.0];
/// Pixels with accumulated alpha below this carry no depth.
pub const VALID_ALPHA: f32 = 0.5;
/// Default camera distance as a multiple of the bounding-box diagonal.
pub const RING_RADIUS_FACTOR: f64 = 2.5;

/// A camera and its alpha-normalized depth map; 0 marks invalid pixels.
#[derive(Debug, Clone)]
pub struct DepthView {
    pub camera: CameraModel,
    pub depth: Vec<f32>,
}

/// Center and diagonal of the primitive means' bounding box.
pub fn field_bounds(field: &GaussianField) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let (lo, hi) = field
        .mean_bounds()
        .ok_or_else(|| Error::validation("field is empty"))?;
    if !((hi - lo).norm() > 0.0) {
        return Err(Error::validation("field bounding box has zero extent"));
    }
    Ok((lo, hi))
}

/// Cameras on `n_views` azimuths × 3 elevation rings, all aimed at the bounds
/// center from distance `radius`.
pub fn ring_cameras(center: Vector3<f64>, object_radius: f64, n_views: usize, radius: f64,
                    resolution: usize) -> Vec<CameraModel> {
    let fov = 2.0 * (1.15 * object_radius / radius).min(0.95).asin();
    let near = (radius - 1.5 * object_radius).max(0.01 * radius);
    let far = radius + 1.5 * object_radius;
    let mut cams = Vec::with_capacity(n_views * RING_ELEVATIONS_DEG.len());
    for el in RING_ELEVATIONS_DEG.map(f64::to_radians) {
        for k in 0..n_views {
            let az = std::f64::consts::TAU * k as f64 / n_views as f64;
            let eye = center + radius * Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin());
            let pose = CameraModel::look_at_pose(eye, center, Vector3::z());
            cams.push(CameraModel::with_fov(resolution, resolution, fov, pose).with_clip(near, far));
        }
    }
    cams
}

pub fn render_depth_ring(field: &GaussianField, n_views: usize, radius: f64,
                         resolution: usize) -> Result<Vec<DepthView>> {
    if n_views < 8 {
        return Err(Error::validation("depth ring needs at least 8 views"));
    }
    let (lo, hi) = field_bounds(field)?;
    let center = (lo + hi) * 0.5;
    let max_scale = field
        .primitives
        .iter()
        .map(|p| p.scale.max())
        .fold(0.0, f64::max);
    let object_radius = 0.5 * (hi - lo).norm() + 3.0 * max_scale;
    let cams = ring_cameras(center, object_radius, n_views, radius, resolution);
    let opts = RasterOptions {
        normalize_depth: true,
    };
    let poses = NodePoses::new();
    Ok(cams
        .into_iter()
        .map(|camera| {
            let t = render_view(field, &poses, &camera, &TiledRasterizer, &opts);
            let depth = t
                .depth
                .iter()
                .zip(&t.accum_alpha)
                .map(|(&d, &a)| if a >= VALID_ALPHA { d } else { 0.0 })
                .collect();
            DepthView { camera, depth }
        })
        .collect())
}

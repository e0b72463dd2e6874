use nalgebra::{Matrix2x3, Matrix3, Vector3};
use rayon::prelude::*;

use super::camera::CameraModel;
use super::sh::shade_sh;
use crate::types::{GaussianField, NodePoses};

/// Added to the 2D covariance diagonal, pixel².
pub const LOW_PASS_FLOOR: f64 = 0.3;
/// Footprint extent in standard deviations.
pub const EXTENT_SIGMA: f64 = 3.0;

/// Screen-space footprint of one primitive for one camera.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSplat {
    /// Source primitive index; also the depth-tie-break key.
    pub index: u32,
    pub pixel_center: [f64; 2],
    /// `[xx, xy, yy]` in pixel², floor included.
    pub cov2d: [f64; 3],
    /// Inverse of `cov2d`, `[xx, xy, yy]`.
    pub conic: [f64; 3],
    pub view_depth: f64,
    pub alpha_peak: f64,
    pub rgb: [f64; 3],
    /// 3σ radius from the major eigenvalue, pixels.
    pub radius: f64,
    /// Covered pixel rectangle `[x0, y0, x1, y1)`, clipped to the image.
    pub rect: [u32; 4],
}

/// `J W Σ Wᵀ Jᵀ` for a camera-frame covariance at camera-frame point `p`.
pub fn project_covariance(cov_cam: &Matrix3<f64>, p: &Vector3<f64>, fx: f64, fy: f64) -> [f64; 3] {
    let iz = 1.0 / p.z;
    let j = Matrix2x3::new(
        fx * iz, 0.0, -fx * p.x * iz * iz,
        0.0, fy * iz, -fy * p.y * iz * iz,
    );
    let c = j * cov_cam * j.transpose();
    [c[(0, 0)], 0.5 * (c[(0, 1)] + c[(1, 0)]), c[(1, 1)]]
}

fn project_one(
    index: usize,
    field: &GaussianField,
    node_pose: &crate::types::RigidTransform,
    camera: &CameraModel,
    cam_center: &Vector3<f64>,
) -> Option<ProjectedSplat> {
    let prim = &field.primitives[index];
    let mean_world = node_pose.transform_point(&prim.mean);
    let p = camera.pose.transform_point(&mean_world);
    if !(p.z > camera.near && p.z < camera.far) {
        return None;
    }
    let rot = camera.pose.rotation_matrix() * node_pose.rotation_matrix() * prim.rotation_matrix();
    let s2 = Matrix3::from_diagonal(&prim.scale.component_mul(&prim.scale));
    let cov_cam = rot * s2 * rot.transpose();
    let mut cov = project_covariance(&cov_cam, &p, camera.fx, camera.fy);
    cov[0] += LOW_PASS_FLOOR;
    cov[2] += LOW_PASS_FLOOR;
    let det = cov[0] * cov[2] - cov[1] * cov[1];
    if !(det > 0.0) {
        return None;
    }
    let conic = [cov[2] / det, -cov[1] / det, cov[0] / det];
    let mid = 0.5 * (cov[0] + cov[2]);
    let lambda_max = mid + (mid * mid - det).max(0.0).sqrt();
    let radius = EXTENT_SIGMA * lambda_max.sqrt();

    let u = camera.fx * p.x / p.z + camera.cx;
    let v = camera.fy * p.y / p.z + camera.cy;
    // pixel i samples at i + 0.5; one pixel of margin on each side
    let x0 = (u - radius - 0.5).floor() - 1.0;
    let x1 = (u + radius - 0.5).ceil() + 2.0;
    let y0 = (v - radius - 0.5).floor() - 1.0;
    let y1 = (v + radius - 0.5).ceil() + 2.0;
    let (w, h) = (camera.width as f64, camera.height as f64);
    let rect = [
        x0.clamp(0.0, w) as u32,
        y0.clamp(0.0, h) as u32,
        x1.clamp(0.0, w) as u32,
        y1.clamp(0.0, h) as u32,
    ];
    if rect[0] >= rect[2] || rect[1] >= rect[3] {
        return None;
    }

    let dir_world = (mean_world - cam_center).normalize();
    let dir_local = node_pose.rotation.inverse() * dir_world;
    let rgb = shade_sh(&prim.sh, field.sh_degree, &dir_local);
    Some(ProjectedSplat {
        index: index as u32,
        pixel_center: [u, v],
        cov2d: cov,
        conic,
        view_depth: p.z,
        alpha_peak: prim.opacity,
        rgb,
        radius,
        rect,
    })
}

/// Projects every visible primitive; output is in primitive-index order.
pub fn project(field: &GaussianField, poses: &NodePoses, camera: &CameraModel) -> Vec<ProjectedSplat> {
    let per_prim = field.per_primitive_poses(poses);
    let center = camera.center();
    (0..field.len())
        .into_par_iter()
        .filter_map(|i| project_one(i, field, &per_prim[i], camera, &center))
        .collect()
}

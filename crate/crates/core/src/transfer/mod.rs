//! Conversion between triangle meshes and Gaussian fields.

mod decimate;
mod depth_ring;
mod marching_cubes;
mod mesh_to_gs;
pub mod metrics;
mod tsdf;

pub use decimate::{decimate, Collapse, Decimator, MIN_NORMAL_COSINE, MIN_TARGET_FACES};
pub use depth_ring::{field_bounds, render_depth_ring, ring_cameras, DepthView, RING_ELEVATIONS_DEG,
                     RING_RADIUS_FACTOR, VALID_ALPHA};
pub use marching_cubes::{case_table, extract_mesh, CaseTable};
pub use mesh_to_gs::{mesh_to_gaussians, CONVERTED_OPACITY, FLATTEN_EPS};
pub use tsdf::{tsdf_fuse, TsdfVolume};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{GaussianField, TriangleMesh};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionParams {
    /// Azimuths per elevation ring.
    pub n_views: usize,
    /// Camera distance; `None` means [`RING_RADIUS_FACTOR`] × bounding diagonal.
    pub radius: Option<f64>,
    pub resolution: usize,
    /// Voxel edge; `None` means bounding diagonal / 128.
    pub voxel_size: Option<f64>,
    /// Truncation distance in voxels.
    pub truncation_voxels: f64,
    /// Face budget for decimation; `None` keeps the marching-cubes output.
    pub target_faces: Option<usize>,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            n_views: 8,
            radius: None,
            resolution: 256,
            voxel_size: None,
            truncation_voxels: 3.0,
            target_faces: None,
        }
    }
}

/// Depth-ring rendering, TSDF fusion, then marching cubes and optional
/// decimation. Also returns the volume the mesh was extracted from.
pub fn gaussians_to_mesh_with_volume(field: &GaussianField, params: &FusionParams)
                                     -> Result<(TriangleMesh, TsdfVolume)> {
    field.validate()?;
    let (lo, hi) = field_bounds(field)?;
    let diag = (hi - lo).norm();
    let voxel = params.voxel_size.unwrap_or(diag / 128.0);
    if !(voxel > 0.0) {
        return Err(Error::validation("voxel size must be positive"));
    }
    let radius = params.radius.unwrap_or(RING_RADIUS_FACTOR * diag);
    let views = render_depth_ring(field, params.n_views, radius, params.resolution)?;
    let trunc = params.truncation_voxels * voxel;
    let max_scale = field.primitives.iter().map(|p| p.scale.max()).fold(0.0, f64::max);
    let pad = trunc + 3.0 * max_scale + 2.0 * voxel;
    let mut volume = TsdfVolume::covering(lo, hi, pad, voxel, trunc)?;
    log::debug!("fusing {} views into {:?} voxels", views.len(), volume.dims);
    for view in &views {
        tsdf_fuse(&mut volume, &view.camera, &view.depth)?;
    }
    let Some(target) = params.target_faces else {
        let mesh = drop_cavities(&extract_mesh(&volume));
        if mesh.is_empty() {
            return Err(Error::validation("fused volume contains no surface"));
        }
        return Ok((mesh, volume));
    };
    // Decimation preserves topology, so tunnels left by fusion noise can hold
    // the face count above the target; halve the grid until it fits.
    loop {
        let mesh = drop_cavities(&extract_mesh(&volume));
        if mesh.is_empty() {
            return Err(Error::validation("fused volume contains no surface"));
        }
        let mesh = decimate(&mesh, target)?;
        if mesh.faces.len() <= target || volume.dims.iter().any(|&d| d < 8) {
            return Ok((mesh, volume));
        }
        log::warn!(
            "decimation stopped at {} faces (target {target}); re-extracting at voxel {}",
            mesh.faces.len(),
            2.0 * volume.voxel_size
        );
        volume = volume.downsampled()?;
    }
}

pub fn drop_cavities(mesh: &TriangleMesh) -> TriangleMesh {
    let mut faces = Vec::with_capacity(mesh.faces.len());
    for comp in mesh.components() {
        let volume: f64 = comp
            .iter()
            .map(|&f| {
                let [a, b, c] = mesh.triangle(f);
                a.dot(&b.cross(&c))
            })
            .sum();
        if volume > 0.0 {
            faces.extend(comp.iter().map(|&f| mesh.faces[f]));
        }
    }
    let mut out = TriangleMesh {
        vertices: mesh.vertices.clone(),
        faces,
        colors: mesh.colors.clone(),
    };
    out.compact();
    out
}

pub fn gaussians_to_mesh(field: &GaussianField, params: &FusionParams) -> Result<TriangleMesh> {
    gaussians_to_mesh_with_volume(field, params).map(|(m, _)| m)
}

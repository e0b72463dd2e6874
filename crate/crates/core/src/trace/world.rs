use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::raster::EXTENT_SIGMA;
use crate::types::{GaussianField, NodePoses};

/// Scales below this are raised before inverting the covariance.
pub const MIN_TRACE_SCALE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Vector3::repeat(f64::INFINITY),
            max: Vector3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&o.min),
            max: self.max.sup(&o.max),
        }
    }

    pub fn contains(&self, o: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] <= o.min[k] && self.max[k] >= o.max[k])
    }

    pub fn centroid(&self) -> Vector3<f64> {
        (self.min + self.max) * 0.5
    }

    pub fn surface_area(&self) -> f64 {
        let d = self.max - self.min;
        if d.iter().any(|v| *v < 0.0) {
            return 0.0;
        }
        2.0 * (d.x * d.y + d.y * d.z + d.z * d.x)
    }

    /// Slab test against `[0, t_max]`.
    #[inline]
    pub fn hit(&self, origin: &Vector3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> bool {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for k in 0..3 {
            let a = (self.min[k] - origin[k]) * inv_dir[k];
            let b = (self.max[k] - origin[k]) * inv_dir[k];
            // f64::min/max drop a NaN operand (origin on a slab plane with zero direction)
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
        t0 <= t1
    }
}

/// A primitive placed in the world frame with its inverse covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldGaussian {
    pub mean: Vector3<f64>,
    pub inv_cov: Matrix3<f64>,
    pub opacity: f64,
    /// 3σ ellipsoid bounds.
    pub bounds: Aabb,
}

/// World-posed snapshot of a field, read-only during tracing.
#[derive(Debug, Clone, Default)]
pub struct WorldGaussians {
    pub items: Vec<WorldGaussian>,
}

impl WorldGaussians {
    pub fn from_field(field: &GaussianField, poses: &NodePoses) -> Self {
        let per_prim = field.per_primitive_poses(poses);
        let items = field
            .primitives
            .par_iter()
            .zip(per_prim.par_iter())
            .map(|(p, pose)| {
                let mean = pose.transform_point(&p.mean);
                let r = pose.rotation_matrix() * p.rotation_matrix();
                let s = p.scale.map(|v| v.max(MIN_TRACE_SCALE));
                let inv_s2 = Matrix3::from_diagonal(&s.map(|v| 1.0 / (v * v)));
                let s2 = Matrix3::from_diagonal(&s.component_mul(&s));
                let cov = r * s2 * r.transpose();
                let half = Vector3::new(cov[(0, 0)], cov[(1, 1)], cov[(2, 2)])
                    .map(|v| EXTENT_SIGMA * v.max(0.0).sqrt());
                WorldGaussian {
                    mean,
                    inv_cov: r * inv_s2 * r.transpose(),
                    opacity: p.opacity,
                    bounds: Aabb {
                        min: mean - half,
                        max: mean + half,
                    },
                }
            })
            .collect();
        Self { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

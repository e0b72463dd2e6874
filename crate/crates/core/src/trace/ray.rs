use nalgebra::Vector3;

use super::world::WorldGaussian;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vector3<f64>,
    /// Unit length.
    pub direction: Vector3<f64>,
    pub t_max: f64,
}

impl Ray {
    /// Normalizes `direction`.
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>, t_max: f64) -> Self {
        Self {
            origin,
            direction: direction.normalize(),
            t_max,
        }
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.origin + self.direction * t
    }

    pub fn inv_direction(&self) -> Vector3<f64> {
        self.direction.map(|v| 1.0 / v)
    }
}

/// Point of maximum Gaussian density along the ray, clamped to `[0, t_max]`,
/// and the opacity-weighted density there.
pub fn ray_gaussian_peak(ray: &Ray, g: &WorldGaussian) -> (f64, f64) {
    let sd = g.inv_cov * ray.direction;
    let denom = ray.direction.dot(&sd);
    let t = if denom > 0.0 {
        ((g.mean - ray.origin).dot(&sd) / denom).clamp(0.0, ray.t_max)
    } else {
        0.0
    };
    let diff = ray.at(t) - g.mean;
    let q = diff.dot(&(g.inv_cov * diff));
    (t, g.opacity * (-0.5 * q).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::WorldGaussians;
    use crate::types::{GaussianField, GaussianPrimitive, NodePoses};

    fn iso(mean: Vector3<f64>, s: f64, op: f64) -> WorldGaussian {
        let f = GaussianField::from_primitives(0, vec![GaussianPrimitive::isotropic(mean, s, op, [0.5; 3])]);
        WorldGaussians::from_field(&f, &NodePoses::new()).items.remove(0)
    }

    #[test]
    fn through_mean() {
        let g = iso(Vector3::new(0.0, 0.0, 4.0), 0.2, 0.7);
        let (t, r) = ray_gaussian_peak(&Ray::new(Vector3::zeros(), Vector3::z(), 100.0), &g);
        assert!((t - 4.0).abs() < 1e-12);
        assert!((r - 0.7).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_miss_distance() {
        let (rr, s, op) = (0.15, 0.1, 0.9);
        let g = iso(Vector3::new(rr, 0.0, 3.0), s, op);
        let (t, resp) = ray_gaussian_peak(&Ray::new(Vector3::zeros(), Vector3::z(), 100.0), &g);
        assert!((t - 3.0).abs() < 1e-12);
        let expect = op * (-rr * rr / (2.0 * s * s)).exp();
        assert!((resp - expect).abs() < 1e-12);
    }

    #[test]
    fn behind_origin_clamps() {
        let g = iso(Vector3::new(0.0, 0.0, -2.0), 0.2, 0.7);
        let (t, _) = ray_gaussian_peak(&Ray::new(Vector3::zeros(), Vector3::z(), 100.0), &g);
        assert_eq!(t, 0.0);
    }
}

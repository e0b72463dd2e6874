use nalgebra::{Matrix3, Point3, Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

/// A proper rigid transform `x -> R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Self::new(UnitQuaternion::identity(), t)
    }

    pub fn from_rotation(r: UnitQuaternion<f64>) -> Self {
        Self::new(r, Vector3::zeros())
    }

    /// Builds a transform from a `(w,x,y,z)` quaternion, normalizing it.
    /// Returns `None` for a zero or non-finite quaternion.
    pub fn from_wxyz(q: [f64; 4], t: [f64; 3]) -> Option<Self> {
        let quat = Quaternion::new(q[0], q[1], q[2], q[3]);
        let n = quat.norm();
        if !n.is_finite() || n < 1e-12 || t.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(Self::new(
            UnitQuaternion::from_quaternion(quat),
            Vector3::from(t),
        ))
    }

    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn transform_point3(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.transform_point(&p.coords))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform {
            rotation: inv,
            translation: -(inv * self.translation),
        }
    }

    /// Rotation determinant is +1 within `tol`.
    pub fn is_proper(&self, tol: f64) -> bool {
        (self.rotation_matrix().determinant() - 1.0).abs() <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.translation.norm() <= tol && self.rotation.angle() <= tol
    }

    /// Linear translation, shortest-arc slerp on rotation. `s` in [0,1].
    pub fn interpolate(&self, other: &RigidTransform, s: f64) -> RigidTransform {
        let mut q1 = *other.rotation.quaternion();
        if self.rotation.quaternion().dot(&q1) < 0.0 {
            q1 = -q1;
        }
        let target = UnitQuaternion::new_unchecked(q1);
        let rotation = self
            .rotation
            .try_slerp(&target, s, 1e-12)
            .unwrap_or(self.rotation);
        RigidTransform {
            rotation,
            translation: self.translation.lerp(&other.translation, s),
        }
    }
}

/// Serialized pose: `{"p": [x,y,z], "q": [w,x,y,z]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseDoc {
    #[serde(default)]
    pub p: [f64; 3],
    #[serde(default = "identity_wxyz")]
    pub q: [f64; 4],
}

fn identity_wxyz() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

impl Default for PoseDoc {
    fn default() -> Self {
        Self {
            p: [0.0; 3],
            q: identity_wxyz(),
        }
    }
}

impl PoseDoc {
    pub fn to_transform(&self) -> Option<RigidTransform> {
        RigidTransform::from_wxyz(self.q, self.p)
    }
}

impl From<&RigidTransform> for PoseDoc {
    fn from(t: &RigidTransform) -> Self {
        PoseDoc {
            p: [t.translation.x, t.translation.y, t.translation.z],
            q: t.wxyz(),
        }
    }
}

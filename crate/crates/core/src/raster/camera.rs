use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};

use crate::error::{Error, Result};
use crate::types::RigidTransform;

/// Pinhole camera. Camera frame: +x right, +y down, +z forward. Pixel `(i, j)`
/// samples the image plane at `(i + 0.5, j + 0.5)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    /// World → camera.
    pub pose: RigidTransform,
    pub near: f64,
    pub far: f64,
}

pub const MIN_IMAGE_SIDE: usize = 16;

impl CameraModel {
    /// Centered principal point and a vertical field of view in radians.
    pub fn with_fov(width: usize, height: usize, fov_y: f64, pose: RigidTransform) -> Self {
        let f = 0.5 * height as f64 / (0.5 * fov_y).tan();
        Self {
            fx: f,
            fy: f,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
            pose,
            near: 0.01,
            far: 1000.0,
        }
    }

    pub fn with_clip(mut self, near: f64, far: f64) -> Self {
        self.near = near;
        self.far = far;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::validation("camera focal lengths must be positive"));
        }
        if !(self.near > 0.0 && self.near < self.far) {
            return Err(Error::validation("camera clip planes must satisfy 0 < near < far"));
        }
        if self.width < MIN_IMAGE_SIDE || self.height < MIN_IMAGE_SIDE {
            return Err(Error::validation(format!(
                "camera image {}x{} below minimum side {MIN_IMAGE_SIDE}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    /// Camera center in world coordinates.
    pub fn center(&self) -> Vector3<f64> {
        self.pose.inverse().translation
    }

    /// Optical axis direction in world coordinates.
    pub fn forward(&self) -> Vector3<f64> {
        self.pose.rotation.inverse() * Vector3::z()
    }

    /// World ray through pixel `(i, j)`'s sample point: `(origin, unit direction)`.
    pub fn pixel_ray(&self, i: usize, j: usize) -> (Vector3<f64>, Vector3<f64>) {
        let d_cam = Vector3::new(
            (i as f64 + 0.5 - self.cx) / self.fx,
            (j as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        );
        let d = (self.pose.rotation.inverse() * d_cam).normalize();
        (self.center(), d)
    }

    /// World → camera pose of a camera at `eye` looking at `target`.
    pub fn look_at_pose(eye: Vector3<f64>, target: Vector3<f64>, up: Vector3<f64>) -> RigidTransform {
        let fwd = (target - eye).normalize();
        let mut right = (-up).cross(&fwd);
        if right.norm() < 1e-9 {
            let alt = if fwd.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
            right = (-alt).cross(&fwd);
        }
        let right = right.normalize();
        let down = fwd.cross(&right);
        let cam_to_world = Matrix3::from_columns(&[right, down, fwd]);
        let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
            cam_to_world.transpose(),
        ));
        RigidTransform::new(rot, -(rot * eye))
    }
}

use std::f64::consts::TAU;

use nalgebra::Vector3;
use rayon::prelude::*;

use super::ray::Ray;
use super::tracer::RayTracer;
use crate::error::{Error, Result};
use crate::types::RigidTransform;

/// Spinning multi-channel LiDAR. Sensor frame: +x forward, +z up; azimuth is
/// measured about +z from +x.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarModel {
    /// Elevation angle per channel, radians.
    pub channels: Vec<f64>,
    pub azimuth_step: f64,
    pub max_range: f64,
    /// Sensor → world.
    pub pose: RigidTransform,
    pub alpha_threshold: f64,
}

impl LidarModel {
    /// `count` channels evenly spread over `[lo, hi]` radians.
    pub fn uniform(count: usize, lo: f64, hi: f64, azimuth_step: f64, max_range: f64) -> Self {
        let channels = (0..count)
            .map(|i| {
                if count == 1 {
                    0.5 * (lo + hi)
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect();
        Self {
            channels,
            azimuth_step,
            max_range,
            pose: RigidTransform::identity(),
            alpha_threshold: 0.5,
        }
    }

    pub fn azimuth_count(&self) -> usize {
        (TAU / self.azimuth_step).round() as usize
    }

    pub fn ray_count(&self) -> usize {
        self.channels.len() * self.azimuth_count()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.azimuth_step > 0.0) {
            return Err(Error::validation("azimuth step must be positive"));
        }
        let n = self.azimuth_count();
        if n == 0 || (n as f64 * self.azimuth_step - TAU).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "azimuth step {} does not divide 2π into an integer ray count",
                self.azimuth_step
            )));
        }
        if !(self.max_range > 0.0) {
            return Err(Error::validation("max range must be positive"));
        }
        if !(self.alpha_threshold > 0.0 && self.alpha_threshold <= 1.0) {
            return Err(Error::validation("alpha threshold must lie in (0, 1]"));
        }
        if self.channels.is_empty() || self.channels.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("lidar needs at least one finite channel angle"));
        }
        Ok(())
    }

    /// Sensor-frame unit direction for `(channel, azimuth index)`.
    pub fn direction(&self, channel: usize, az_index: usize) -> Vector3<f64> {
        let el = self.channels[channel];
        let az = az_index as f64 * self.azimuth_step;
        Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LidarPoint {
    /// Sensor frame, meters.
    pub position: [f64; 3],
    pub ring: u16,
    pub azimuth: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<LidarPoint>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One ray per `(channel, azimuth)`; returns are channel-major, azimuth ascending.
pub fn scan(tracer: &dyn RayTracer, lidar: &LidarModel) -> Result<PointCloud> {
    lidar.validate()?;
    let n_az = lidar.azimuth_count();
    let origin = lidar.pose.translation;
    let points = (0..lidar.ray_count())
        .into_par_iter()
        .filter_map(|k| {
            let (ch, az) = (k / n_az, k % n_az);
            let d_sensor = lidar.direction(ch, az);
            let ray = Ray {
                origin,
                direction: lidar.pose.transform_vector(&d_sensor),
                t_max: lidar.max_range,
            };
            let depth = tracer.trace(&ray, lidar.alpha_threshold).depth?;
            let p = d_sensor * depth;
            Some(LidarPoint {
                position: [p.x, p.y, p.z],
                ring: ch as u16,
                azimuth: az as f64 * lidar.azimuth_step,
            })
        })
        .collect();
    Ok(PointCloud { points })
}

use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::CameraModel;

/// Truncated signed distance grid. Sample `(i, j, k)` sits at
/// `origin + (i, j, k) * voxel_size`; positive values are in front of surfaces.
#[derive(Debug, Clone, PartialEq)]
pub struct TsdfVolume {
    pub origin: Vector3<f64>,
    pub voxel_size: f64,
    pub dims: [usize; 3],
    pub tsdf: Vec<f64>,
    pub weights: Vec<f64>,
    pub truncation: f64,
}

impl TsdfVolume {
    pub fn new(origin: Vector3<f64>, voxel_size: f64, dims: [usize; 3], truncation: f64) -> Result<Self> {
        if !(voxel_size > 0.0) {
            return Err(Error::validation("voxel size must be positive"));
        }
        if !(truncation >= 2.0 * voxel_size) {
            return Err(Error::validation("truncation must be at least two voxels"));
        }
        let n = dims[0] * dims[1] * dims[2];
        if n == 0 {
            return Err(Error::validation("volume has zero voxels"));
        }
        Ok(Self {
            origin,
            voxel_size,
            dims,
            tsdf: vec![1.0; n],
            weights: vec![0.0; n],
            truncation,
        })
    }

    /// Grid covering `[lo, hi]` with `pad` meters on every side.
    pub fn covering(lo: Vector3<f64>, hi: Vector3<f64>, pad: f64, voxel_size: f64, truncation: f64) -> Result<Self> {
        let origin = lo - Vector3::repeat(pad);
        let extent = hi - lo + Vector3::repeat(2.0 * pad);
        let dims = [0, 1, 2].map(|k| (extent[k] / voxel_size).ceil() as usize + 1);
        Self::new(origin, voxel_size, dims, truncation)
    }

    /// Fills from an analytic signed distance with unit weights.
    pub fn from_sdf(origin: Vector3<f64>, voxel_size: f64, dims: [usize; 3], truncation: f64,
                    sdf: impl Fn(&Vector3<f64>) -> f64) -> Result<Self> {
        let mut v = Self::new(origin, voxel_size, dims, truncation)?;
        for idx in 0..v.tsdf.len() {
            let p = v.position(v.coords(idx));
            v.tsdf[idx] = (sdf(&p) / truncation).clamp(-1.0, 1.0);
            v.weights[idx] = 1.0;
        }
        Ok(v)
    }

    /// Half-resolution copy on the even samples, each a weight-averaged tent
    /// filter over its 3×3×3 neighbourhood. Weights add up.
    pub fn downsampled(&self) -> Result<TsdfVolume> {
        let dims = self.dims.map(|d| d.div_ceil(2));
        let mut out = TsdfVolume::new(self.origin, 2.0 * self.voxel_size, dims, self.truncation.max(4.0 * self.voxel_size))?;
        let tent = [0.5, 1.0, 0.5];
        for idx in 0..out.tsdf.len() {
            let [i, j, k] = out.coords(idx);
            let (mut sum, mut wsum, mut wtot) = (0.0, 0.0, 0.0);
            for (dk, tk) in tent.iter().enumerate() {
                for (dj, tj) in tent.iter().enumerate() {
                    for (di, ti) in tent.iter().enumerate() {
                        let (x, y, z) = ((2 * i + di).checked_sub(1), (2 * j + dj).checked_sub(1), (2 * k + dk).checked_sub(1));
                        let (Some(x), Some(y), Some(z)) = (x, y, z) else { continue };
                        if x >= self.dims[0] || y >= self.dims[1] || z >= self.dims[2] {
                            continue;
                        }
                        let n = self.index(x, y, z);
                        let w = self.weights[n] * ti * tj * tk;
                        sum += self.tsdf[n] * w;
                        wsum += w;
                        wtot += self.weights[n];
                    }
                }
            }
            if wsum > 0.0 {
                out.tsdf[idx] = sum / wsum;
                out.weights[idx] = wtot;
            }
        }
        Ok(out)
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.dims[0];
        let j = (idx / self.dims[0]) % self.dims[1];
        let k = idx / (self.dims[0] * self.dims[1]);
        [i, j, k]
    }

    pub fn position(&self, [i, j, k]: [usize; 3]) -> Vector3<f64> {
        self.origin + Vector3::new(i as f64, j as f64, k as f64) * self.voxel_size
    }

    /// Raw dump: `TSDF` magic, dims as 3×u32, origin as 3×f32, voxel size and
    /// truncation as f32, then tsdf and weights as f32 arrays, all little-endian.
    pub fn write_raw(&self, path: &Path) -> Result<()> {
        let mut out = b"TSDF".to_vec();
        for d in self.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in self.origin.iter().chain([self.voxel_size, self.truncation].iter()) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        for v in self.tsdf.iter().chain(self.weights.iter()) {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&out).map_err(|e| Error::io(path, e))
    }
}

/// Projective TSDF update from one depth image (0 = invalid pixel).
pub fn tsdf_fuse(volume: &mut TsdfVolume, camera: &CameraModel, depth: &[f32]) -> Result<()> {
    if depth.len() != camera.width * camera.height {
        return Err(Error::validation(format!(
            "depth image has {} pixels, camera expects {}x{}",
            depth.len(),
            camera.width,
            camera.height
        )));
    }
    let slice = volume.dims[0] * volume.dims[1];
    let (dims, origin, voxel, trunc) = (volume.dims, volume.origin, volume.voxel_size, volume.truncation);
    volume
        .tsdf
        .par_chunks_mut(slice)
        .zip(volume.weights.par_chunks_mut(slice))
        .enumerate()
        .for_each(|(k, (tsdf, weights))| {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let p = origin + Vector3::new(i as f64, j as f64, k as f64) * voxel;
                    let pc = camera.pose.transform_point(&p);
                    if pc.z <= 0.0 {
                        continue;
                    }
                    let u = (camera.fx * pc.x / pc.z + camera.cx).floor();
                    let v = (camera.fy * pc.y / pc.z + camera.cy).floor();
                    if u < 0.0 || v < 0.0 || u >= camera.width as f64 || v >= camera.height as f64 {
                        continue;
                    }
                    let d = depth[v as usize * camera.width + u as usize] as f64;
                    if d <= 0.0 {
                        continue;
                    }
                    let sdf = d - pc.z;
                    if sdf <= -trunc {
                        continue;
                    }
                    let idx = i + dims[0] * j;
                    let w = weights[idx];
                    let value = (sdf / trunc).clamp(-1.0, 1.0);
                    tsdf[idx] = (tsdf[idx] * w + value) / (w + 1.0);
                    weights[idx] = w + 1.0;
                }
            }
        });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::RigidTransform;

    fn frontal_camera() -> CameraModel {
        CameraModel {
            fx: 40.0,
            fy: 40.0,
            cx: 16.0,
            cy: 16.0,
            width: 32,
            height: 32,
            pose: RigidTransform::identity(),
            near: 0.1,
            far: 10.0,
        }
    }

    fn volume() -> TsdfVolume {
        TsdfVolume::new(Vector3::new(-0.2, -0.2, 1.5), 0.02, [21, 21, 51], 0.06).unwrap()
    }

    #[test]
    fn plane_zero_crossing() {
        let mut v = volume();
        let cam = frontal_camera();
        tsdf_fuse(&mut v, &cam, &vec![2.0; 32 * 32]).unwrap();
        // center column crosses zero at z = 2
        let (i, j) = (10, 10);
        let mut crossing = None;
        for k in 0..v.dims[2] - 1 {
            let (a, b) = (v.index(i, j, k), v.index(i, j, k + 1));
            if v.weights[a] > 0.0 && v.weights[b] > 0.0 && v.tsdf[a] >= 0.0 && v.tsdf[b] < 0.0 {
                let za = v.position([i, j, k]).z;
                crossing = Some(za + v.voxel_size * v.tsdf[a] / (v.tsdf[a] - v.tsdf[b]));
            }
        }
        assert!((crossing.unwrap() - 2.0).abs() < v.voxel_size);
    }

    #[test]
    fn double_fusion_keeps_values_doubles_weights() {
        let cam = frontal_camera();
        let depth = vec![2.0; 32 * 32];
        let mut once = volume();
        tsdf_fuse(&mut once, &cam, &depth).unwrap();
        let mut twice = once.clone();
        tsdf_fuse(&mut twice, &cam, &depth).unwrap();
        assert_eq!(once.tsdf, twice.tsdf);
        for (a, b) in once.weights.iter().zip(&twice.weights) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn beyond_truncation_untouched() {
        let mut v = volume();
        tsdf_fuse(&mut v, &frontal_camera(), &vec![2.0; 32 * 32]).unwrap();
        let idx = v.index(10, 10, v.dims[2] - 1); // z = 2.5, far behind the plane
        assert_eq!(v.weights[idx], 0.0);
    }

    #[test]
    fn truncation_must_cover_two_voxels() {
        assert!(TsdfVolume::new(Vector3::zeros(), 0.1, [4, 4, 4], 0.15).is_err());
    }
}

//! Procedural meshes, fields and camera rigs used by tests, benchmarks and the CLI.

use std::collections::HashMap;

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::CameraModel;
use crate::types::{GaussianField, GaussianPrimitive, TriangleMesh, MAX_SH_DEGREE, sh_coeff_count};

/// Subdivided icosahedron with outward winding; `20 * 4^subdivisions` faces.
pub fn icosphere(subdivisions: u32, radius: f64) -> TriangleMesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = [
        (-1.0, t, 0.0), (1.0, t, 0.0), (-1.0, -t, 0.0), (1.0, -t, 0.0),
        (0.0, -1.0, t), (0.0, 1.0, t), (0.0, -1.0, -t), (0.0, 1.0, -t),
        (t, 0.0, -1.0), (t, 0.0, 1.0), (-t, 0.0, -1.0), (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, verts: &mut Vec<Vector3<f64>>| {
            *mids.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a as usize] + verts[b as usize]) * 0.5).normalize());
                (verts.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for v in &mut verts {
        *v *= radius;
    }
    TriangleMesh::new(verts, faces)
}

/// Axis-aligned cube centered at the origin, 12 outward triangles.
pub fn cube_mesh(half: f64) -> TriangleMesh {
    let verts = (0..8)
        .map(|c| {
            Vector3::new(
                if c & 1 != 0 { half } else { -half },
                if c & 2 != 0 { half } else { -half },
                if c & 4 != 0 { half } else { -half },
            )
        })
        .collect();
    let faces = vec![
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 7], [4, 7, 6], // +z
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 7], [2, 7, 3], // +y
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 7], [1, 7, 5], // +x
    ];
    TriangleMesh::new(verts, faces)
}

/// Dense grid of flat, nearly opaque Gaussians in the plane `z = distance`,
/// covering `[-half, half]²` in x and y.
pub fn wall_field(distance: f64, half: f64, spacing: f64) -> GaussianField {
    let n = (2.0 * half / spacing).round() as i64;
    let mut prims = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let mean = Vector3::new(-half + i as f64 * spacing, -half + j as f64 * spacing, distance);
            let mut p = GaussianPrimitive::isotropic(mean, spacing, 0.99, [0.8, 0.8, 0.8]);
            p.scale.z = 1e-3 * spacing;
            prims.push(p);
        }
    }
    GaussianField::from_primitives(0, prims)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomFieldSpec {
    pub count: usize,
    /// Means are uniform in `center ± half_extent`.
    pub center: Vector3<f64>,
    pub half_extent: Vector3<f64>,
    pub scale_range: (f64, f64),
    pub opacity_range: (f64, f64),
    pub sh_degree: u8,
}

impl Default for RandomFieldSpec {
    fn default() -> Self {
        Self {
            count: 1000,
            center: Vector3::new(0.0, 0.0, 4.0),
            half_extent: Vector3::new(2.0, 2.0, 2.0),
            scale_range: (0.01, 0.15),
            opacity_range: (0.05, 0.95),
            sh_degree: 0,
        }
    }
}

fn random_rotation(rng: &mut impl Rng) -> Quaternion<f64> {
    // normalized point drawn uniformly from the unit 4-ball
    loop {
        let q = Quaternion::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 0.1 && n <= 1.0 {
            return *UnitQuaternion::from_quaternion(q).quaternion();
        }
    }
}

pub fn random_field(spec: &RandomFieldSpec, seed: u64) -> GaussianField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = spec.sh_degree.min(MAX_SH_DEGREE);
    let n_coeffs = sh_coeff_count(degree);
    let prims = (0..spec.count)
        .map(|_| {
            let mean = spec.center
                + Vector3::from_fn(|k, _| rng.random_range(-1.0..=1.0) * spec.half_extent[k]);
            let scale = Vector3::from_fn(|_, _| rng.random_range(spec.scale_range.0..=spec.scale_range.1));
            let mut p = GaussianPrimitive {
                mean,
                scale,
                rotation: random_rotation(&mut rng),
                opacity: rng.random_range(spec.opacity_range.0..=spec.opacity_range.1),
                ..Default::default()
            };
            p.set_base_color([rng.random(), rng.random(), rng.random()]);
            for k in 1..n_coeffs {
                for c in 0..3 {
                    p.sh[k][c] = rng.random_range(-0.3..0.3);
                }
            }
            p
        })
        .collect();
    GaussianField::from_primitives(degree, prims)
}

/// `count` cameras on a circle of `radius` around `target` at height `height`,
/// all looking at the target.
pub fn orbit_cameras(count: usize, width: usize, height_px: usize, fov_y: f64, target: Vector3<f64>,
                     radius: f64, height: f64) -> Vec<CameraModel> {
    (0..count)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / count as f64;
            let eye = target + Vector3::new(radius * a.cos(), radius * a.sin(), height);
            let pose = CameraModel::look_at_pose(eye, target, Vector3::z());
            CameraModel::with_fov(width, height_px, fov_y, pose)
        })
        .collect()
}

/// Benchmark workload: a random cloud of `count` primitives around the origin
/// and five 640×480 cameras orbiting it.
pub fn bench_scene(count: usize, seed: u64) -> (GaussianField, Vec<CameraModel>) {
    let spec = RandomFieldSpec {
        count,
        center: Vector3::zeros(),
        half_extent: Vector3::repeat(2.0),
        scale_range: (0.005, 0.04),
        opacity_range: (0.1, 0.9),
        sh_degree: 1,
    };
    let field = random_field(&spec, seed);
    let cams = orbit_cameras(5, 640, 480, 60f64.to_radians(), Vector3::zeros(), 6.0, 1.5);
    (field, cams)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_1280_is_closed_and_outward() {
        let m = icosphere(3, 1.0);
        assert_eq!(m.faces.len(), 1280);
        assert_eq!(m.vertices.len(), 642);
        assert!(m.is_closed());
        let v = m.signed_volume();
        assert!(v > 0.0 && v < 4.0 / 3.0 * std::f64::consts::PI);
    }

    #[test]
    fn cube_volume() {
        let m = cube_mesh(0.5);
        assert!(m.is_closed());
        assert!((m.signed_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_field_is_valid_and_seeded() {
        let spec = RandomFieldSpec { sh_degree: 2, count: 50, ..Default::default() };
        let a = random_field(&spec, 7);
        a.validate().unwrap();
        assert_eq!(a, random_field(&spec, 7));
        assert_ne!(a, random_field(&spec, 8));
    }
}

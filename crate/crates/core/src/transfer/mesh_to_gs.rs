use nalgebra::{Matrix3, Rotation3, UnitQuaternion, Vector3};

use crate::types::{GaussianField, GaussianPrimitive, TriangleMesh, SH_C0};

/// Normal-axis scale relative to the tangent scale.
pub const FLATTEN_EPS: f64 = 0.01;
pub const CONVERTED_OPACITY: f64 = 0.9;

/// One flattened Gaussian per face: mean at the barycenter, third local axis
/// along the face normal, first along the longest edge, tangent scales equal to
/// the mean barycenter-to-vertex distance.
pub fn mesh_to_gaussians(mesh: &TriangleMesh) -> GaussianField {
    let primitives = mesh
        .faces
        .iter()
        .map(|&face| face_gaussian(mesh, face))
        .collect();
    GaussianField::from_primitives(0, primitives)
}

/// Longest edge as `(from, to)` vertex indices with `from < to`; equal lengths
/// resolve to the edge with the lowest vertex indices.
fn longest_edge(mesh: &TriangleMesh, face: [u32; 3]) -> (u32, u32) {
    let mut best: Option<(f64, (u32, u32))> = None;
    for k in 0..3 {
        let (a, b) = (face[k], face[(k + 1) % 3]);
        let key = (a.min(b), a.max(b));
        let len = (mesh.vertices[a as usize] - mesh.vertices[b as usize]).norm();
        best = match best {
            Some((l, e)) if l > len || (l == len && e < key) => Some((l, e)),
            _ => Some((len, key)),
        };
    }
    best.expect("three edges").1
}

fn face_gaussian(mesh: &TriangleMesh, face: [u32; 3]) -> GaussianPrimitive {
    let [a, b, c] = face.map(|i| mesh.vertices[i as usize]);
    let mean = (a + b + c) / 3.0;
    let normal = (b - a).cross(&(c - a)).normalize();
    let (from, to) = longest_edge(mesh, face);
    let edge = mesh.vertices[to as usize] - mesh.vertices[from as usize];
    let t1 = (edge - normal * normal.dot(&edge)).normalize();
    let t2 = normal.cross(&t1);
    let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(
        Matrix3::from_columns(&[t1, t2, normal]),
    ));
    let m = ((mean - a).norm() + (mean - b).norm() + (mean - c).norm()) / 3.0;
    let rgb = match &mesh.colors {
        Some(colors) => {
            let [ca, cb, cc] = face.map(|i| colors[i as usize]);
            std::array::from_fn(|k| (ca[k] + cb[k] + cc[k]) / 3.0)
        }
        None => [0.5; 3],
    };
    let mut p = GaussianPrimitive {
        mean,
        scale: Vector3::new(m, m, FLATTEN_EPS * m),
        rotation: *rot.quaternion(),
        opacity: CONVERTED_OPACITY,
        ..Default::default()
    };
    for k in 0..3 {
        p.sh[0][k] = (rgb[k] - 0.5) / SH_C0;
    }
    p
}

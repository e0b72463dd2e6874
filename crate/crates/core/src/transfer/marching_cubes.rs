//! Marching cubes over the zero level set of a [`TsdfVolume`].
//!
//! The 256-case triangle table is generated rather than transcribed: for each
//! case the crossing segments on every cube face are chained into closed loops
//! and triangulated. An ambiguous face (diagonal corners sharing a sign) always
//! separates its inside corners. That choice depends only on the face's own
//! corner signs, so neighbouring cubes agree and the surface has no cracks.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::Vector3;

use super::tsdf::TsdfVolume;
use crate::types::TriangleMesh;

/// Corner `c` sits at offset `(c & 1, (c >> 1) & 1, (c >> 2) & 1)`.
fn corner_offset(c: usize) -> [usize; 3] {
    [c & 1, (c >> 1) & 1, (c >> 2) & 1]
}

/// The 12 cube edges as `(low corner, high corner, axis)`.
fn cube_edges() -> [(usize, usize, usize); 12] {
    let mut edges = [(0, 0, 0); 12];
    let mut n = 0;
    for axis in 0..3 {
        let bit = 1 << axis;
        for c in 0..8 {
            if c & bit == 0 {
                edges[n] = (c, c | bit, axis);
                n += 1;
            }
        }
    }
    edges
}

fn edge_between(edges: &[(usize, usize, usize); 12], a: usize, b: usize) -> usize {
    edges
        .iter()
        .position(|&(x, y, _)| (x, y) == (a.min(b), a.max(b)))
        .expect("adjacent corners")
}

/// Triangles per case as triples of cube edge ids.
pub type CaseTable = Vec<Vec<[u8; 3]>>;

fn generate_table() -> CaseTable {
    let edges = cube_edges();
    let pos = |c: usize| Vector3::from(corner_offset(c).map(|v| v as f64));
    let mid = |e: usize| (pos(edges[e].0) + pos(edges[e].1)) * 0.5;

    // faces as cyclic corner lists with outward normals
    let mut faces = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in 0..2 {
            let corner = |du: usize, dv: usize| (side << axis) | (du << u) | (dv << v);
            let mut normal = Vector3::zeros();
            normal[axis] = if side == 1 { 1.0 } else { -1.0 };
            faces.push(([corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)], normal));
        }
    }

    let mut table = Vec::with_capacity(256);
    let mut flip: Option<bool> = None;
    for case in 0..256usize {
        let inside = |c: usize| case & (1 << c) != 0;
        let mut next = [usize::MAX; 12];
        for (cyc, normal) in &faces {
            let face_edge = |k: usize| edge_between(&edges, cyc[k], cyc[(k + 1) % 4]);
            let crossing: Vec<usize> = (0..4).filter(|&k| inside(cyc[k]) != inside(cyc[(k + 1) % 4])).collect();
            let mut segments: Vec<(usize, usize, usize)> = Vec::new();
            match crossing.len() {
                0 => {}
                2 => {
                    let anchor = *cyc.iter().find(|&&c| inside(c)).expect("inside corner");
                    segments.push((face_edge(crossing[0]), face_edge(crossing[1]), anchor));
                }
                4 => {
                    for k in 0..4 {
                        if inside(cyc[k]) {
                            segments.push((face_edge((k + 3) % 4), face_edge(k), cyc[k]));
                        }
                    }
                }
                _ => unreachable!("a square face has an even number of sign changes"),
            }
            for (a, b, anchor) in segments {
                let (p, q, i) = (mid(a), mid(b), pos(anchor));
                // inside on the left when seen from outside the cube
                let (from, to) = if (q - p).cross(&(i - p)).dot(normal) > 0.0 { (a, b) } else { (b, a) };
                debug_assert_eq!(next[from], usize::MAX);
                next[from] = to;
            }
        }

        let mut tris = Vec::new();
        let mut seen = [false; 12];
        for start in 0..12 {
            if next[start] == usize::MAX || seen[start] {
                continue;
            }
            let mut lp = Vec::new();
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                lp.push(e);
                e = next[e];
            }
            triangulate_loop(&lp, &edges, &mut tris);
        }

        if flip.is_none() && case == 1 {
            // corner 0 alone inside: the normal must point away from it
            let [a, b, c] = tris[0].map(|e| mid(e as usize));
            let n = (b - a).cross(&(c - a));
            flip = Some(n.dot(&(a - pos(0))) < 0.0);
        }
        table.push(tris);
    }
    if flip == Some(true) {
        for tris in &mut table {
            for t in tris.iter_mut() {
                t.swap(1, 2);
            }
        }
    }
    table
}

/// Bitmask of the two cube faces (`2 * axis + side`) containing edge `e`.
fn edge_faces(edges: &[(usize, usize, usize); 12], e: usize) -> u8 {
    let (lo, _, axis) = edges[e];
    (0..3)
        .filter(|&a| a != axis)
        .fold(0, |m, a| m | 1 << (2 * a + ((lo >> a) & 1)))
}

/// Triangulates a crossing loop so that no diagonal joins two vertices on the
/// same cube face. Such a diagonal can coincide with one in the neighbouring
/// cube and leave an edge with four faces. Falls back to a fan.
fn triangulate_loop(lp: &[usize], edges: &[(usize, usize, usize); 12], out: &mut Vec<[u8; 3]>) {
    fn solve(lp: &[usize], faces: &[u8], i: usize, j: usize, out: &mut Vec<[usize; 3]>) -> bool {
        if j - i < 2 {
            return true;
        }
        let ok = |a: usize, b: usize| b - a == 1 || faces[a] & faces[b] == 0;
        for k in i + 1..j {
            if !ok(i, k) || !ok(k, j) {
                continue;
            }
            let mark = out.len();
            out.push([lp[i], lp[k], lp[j]]);
            if solve(lp, faces, i, k, out) && solve(lp, faces, k, j, out) {
                return true;
            }
            out.truncate(mark);
        }
        false
    }
    let faces: Vec<u8> = lp.iter().map(|&e| edge_faces(edges, e)).collect();
    let mut tris = Vec::new();
    if !solve(lp, &faces, 0, lp.len() - 1, &mut tris) {
        tris = (1..lp.len() - 1).map(|k| [lp[0], lp[k], lp[k + 1]]).collect();
    }
    out.extend(tris.into_iter().map(|t| t.map(|e| e as u8)));
}

pub fn case_table() -> &'static CaseTable {
    static TABLE: OnceLock<CaseTable> = OnceLock::new();
    TABLE.get_or_init(generate_table)
}

/// Triangulates `tsdf = 0` over cubes whose eight samples all have weight > 0.
/// Normals face the positive side. Returns an empty mesh when nothing crosses.
pub fn extract_mesh(volume: &TsdfVolume) -> TriangleMesh {
    let table = case_table();
    let edges = cube_edges();
    let [nx, ny, nz] = volume.dims;
    let mut vertex_of: HashMap<(usize, u8), u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    if nx < 2 || ny < 2 || nz < 2 {
        return TriangleMesh::default();
    }
    for k in 0..nz - 1 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let corner_idx: [usize; 8] = std::array::from_fn(|c| {
                    let [dx, dy, dz] = corner_offset(c);
                    volume.index(i + dx, j + dy, k + dz)
                });
                if corner_idx.iter().any(|&c| volume.weights[c] <= 0.0) {
                    continue;
                }
                let vals = corner_idx.map(|c| volume.tsdf[c]);
                let case = (0..8).fold(0usize, |m, c| if vals[c] < 0.0 { m | (1 << c) } else { m });
                if case == 0 || case == 255 {
                    continue;
                }
                for tri in &table[case] {
                    let mut face = [0u32; 3];
                    for (slot, &e) in face.iter_mut().zip(tri) {
                        let (c0, c1, axis) = edges[e as usize];
                        let key = (corner_idx[c0], axis as u8);
                        *slot = *vertex_of.entry(key).or_insert_with(|| {
                            let t = vals[c0] / (vals[c0] - vals[c1]);
                            let p0 = volume.position(volume.coords(corner_idx[c0]));
                            let p1 = volume.position(volume.coords(corner_idx[c1]));
                            vertices.push(p0 + (p1 - p0) * t);
                            (vertices.len() - 1) as u32
                        });
                    }
                    faces.push(face);
                }
            }
        }
    }
    TriangleMesh::new(vertices, faces)
}

//! Quadric error metric edge-collapse simplification.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::types::TriangleMesh;

/// Smallest face count a decimation target may ask for.
pub const MIN_TARGET_FACES: usize = 4;
/// A collapse is rejected when any surviving face normal turns by more than
/// this (cosine between old and new unit normals).
pub const MIN_NORMAL_COSINE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct Collapse {
    pub kept: u32,
    pub removed: u32,
    pub position: Vector3<f64>,
    pub cost: f64,
    /// Quadric cost of placing the merged vertex at either original endpoint.
    pub endpoint_costs: [f64; 2],
    /// False when the cheapest placement was rejected and a fallback was used.
    pub optimal: bool,
    pub faces_after: usize,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    a: u32,
    b: u32,
    stamp: (u32, u32),
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // reversed so the max-heap pops the cheapest, then the lowest edge
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| (other.a, other.b).cmp(&(self.a, self.b)))
    }
}

fn quadric_cost(q: &Matrix4<f64>, v: &Vector3<f64>) -> f64 {
    let h = Vector4::new(v.x, v.y, v.z, 1.0);
    (h.transpose() * q * h)[0].max(0.0)
}

pub struct Decimator {
    vertices: Vec<Vector3<f64>>,
    faces: Vec<Option<[u32; 3]>>,
    vertex_faces: Vec<Vec<usize>>,
    quadrics: Vec<Matrix4<f64>>,
    alive: Vec<bool>,
    locked: Vec<bool>,
    version: Vec<u32>,
    heap: BinaryHeap<Candidate>,
    /// Edges rejected since the last retry.
    deferred: Vec<(u32, u32)>,
    collapsed_since_retry: bool,
    live_faces: usize,
}

impl Decimator {
    pub fn new(mesh: &TriangleMesh) -> Result<Self> {
        mesh.validate()?;
        let n = mesh.vertices.len();
        let mut vertex_faces = vec![Vec::new(); n];
        let mut quadrics = vec![Matrix4::zeros(); n];
        for (f, face) in mesh.faces.iter().enumerate() {
            let [a, b, c] = mesh.triangle(f);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if area > 0.0 {
                let nrm = cross / (2.0 * area);
                let p = Vector4::new(nrm.x, nrm.y, nrm.z, -nrm.dot(&a));
                let k = p * p.transpose() * area;
                for &v in face {
                    quadrics[v as usize] += k;
                }
            }
            for &v in face {
                vertex_faces[v as usize].push(f);
            }
        }
        let mut locked = vec![false; n];
        let counts = mesh.edge_face_counts();
        for (&(a, b), &c) in &counts {
            if c != 2 {
                locked[a as usize] = true;
                locked[b as usize] = true;
            }
        }
        let mut d = Self {
            vertices: mesh.vertices.clone(),
            faces: mesh.faces.iter().copied().map(Some).collect(),
            vertex_faces,
            quadrics,
            alive: vec![true; n],
            locked,
            version: vec![0; n],
            heap: BinaryHeap::new(),
            deferred: Vec::new(),
            collapsed_since_retry: false,
            live_faces: mesh.faces.len(),
        };
        let mut edges: Vec<(u32, u32)> = counts.into_keys().collect();
        edges.sort_unstable();
        for (a, b) in edges {
            d.push_edge(a, b);
        }
        Ok(d)
    }

    pub fn face_count(&self) -> usize {
        self.live_faces
    }

    /// Placements ranked by cost: the quadric minimizer when it is well posed
    /// and near the edge, then the endpoints and the midpoint.
    fn placements(&self, a: u32, b: u32) -> Vec<(Vector3<f64>, f64)> {
        let q = self.quadrics[a as usize] + self.quadrics[b as usize];
        let (pa, pb) = (self.vertices[a as usize], self.vertices[b as usize]);
        let mid = (pa + pb) * 0.5;
        let mut out: Vec<(Vector3<f64>, f64)> =
            [pa, pb, mid].into_iter().map(|v| (v, quadric_cost(&q, &v))).collect();
        let a3: Matrix3<f64> = q.fixed_view::<3, 3>(0, 0).into_owned();
        let rhs = -q.fixed_view::<3, 1>(0, 3).into_owned();
        let scale = a3.norm().max(f64::MIN_POSITIVE);
        let edge_len = (pb - pa).norm();
        if a3.determinant().abs() > 1e-9 * scale.powi(3) {
            if let Some(v) = a3.lu().solve(&rhs) {
                if v.iter().all(|x| x.is_finite()) && (v - mid).norm() <= 2.0 * edge_len {
                    out.push((v, quadric_cost(&q, &v)));
                }
            }
        }
        // stable: ties keep the optimum, then endpoints, ahead
        let extra = out.len() - 3;
        out.rotate_right(extra);
        out.sort_by(|x, y| x.1.total_cmp(&y.1));
        out
    }

    fn push_edge(&mut self, a: u32, b: u32) {
        let (a, b) = (a.min(b), a.max(b));
        if self.locked[a as usize] || self.locked[b as usize] {
            return;
        }
        let cost = self.placements(a, b)[0].1;
        self.heap.push(Candidate {
            cost,
            a,
            b,
            stamp: (self.version[a as usize], self.version[b as usize]),
        });
    }

    fn live_faces_of(&self, v: u32) -> impl Iterator<Item = (usize, [u32; 3])> + '_ {
        self.vertex_faces[v as usize]
            .iter()
            .filter_map(move |&f| self.faces[f].filter(|face| face.contains(&v)).map(|face| (f, face)))
    }

    fn neighbors(&self, v: u32) -> HashSet<u32> {
        self.live_faces_of(v)
            .flat_map(|(_, f)| f)
            .filter(|&u| u != v)
            .collect()
    }

    fn collapse_allowed(&self, a: u32, b: u32, position: &Vector3<f64>) -> bool {
        let (na, nb) = (self.neighbors(a), self.neighbors(b));
        if !na.contains(&b) {
            return false;
        }
        let shared = self
            .live_faces_of(a)
            .filter(|(_, f)| f.contains(&b))
            .count();
        // link condition: the only common neighbors are the two opposite apexes
        if shared != 2 || na.intersection(&nb).count() != 2 {
            return false;
        }
        // keep every vertex at degree three or more; this also stops a
        // tetrahedron from folding flat
        if na.len() + nb.len() < 7 || na.intersection(&nb).any(|&c| self.neighbors(c).len() < 4) {
            return false;
        }
        for v in [a, b] {
            for (_, face) in self.live_faces_of(v) {
                if face.contains(&a) && face.contains(&b) {
                    continue;
                }
                let old = face.map(|u| self.vertices[u as usize]);
                let new = face.map(|u| if u == v { *position } else { self.vertices[u as usize] });
                let n_old = (old[1] - old[0]).cross(&(old[2] - old[0]));
                let n_new = (new[1] - new[0]).cross(&(new[2] - new[0]));
                let (lo, ln) = (n_old.norm(), n_new.norm());
                if ln <= 1e-14 * (lo + 1e-300) || lo == 0.0 {
                    return false;
                }
                if n_old.dot(&n_new) / (lo * ln) < MIN_NORMAL_COSINE {
                    return false;
                }
            }
        }
        true
    }

    /// Applies the cheapest admissible collapse, or returns `None` when no edge
    /// can be collapsed.
    pub fn step(&mut self) -> Option<Collapse> {
        loop {
            let Some(c) = self.heap.pop() else {
                // rejected edges may have become admissible after later collapses
                if !self.collapsed_since_retry || self.deferred.is_empty() {
                    return None;
                }
                self.collapsed_since_retry = false;
                for (a, b) in std::mem::take(&mut self.deferred) {
                    if self.alive[a as usize] && self.alive[b as usize] {
                        self.push_edge(a, b);
                    }
                }
                continue;
            };
            let (a, b) = (c.a, c.b);
            if !self.alive[a as usize] || !self.alive[b as usize] {
                continue;
            }
            if c.stamp != (self.version[a as usize], self.version[b as usize]) {
                continue;
            }
            let ranked = self.placements(a, b);
            let Some(rank) = ranked.iter().position(|(p, _)| self.collapse_allowed(a, b, p)) else {
                self.deferred.push((a, b));
                continue;
            };
            let (position, cost) = ranked[rank];
            if cost > c.cost {
                // a fallback placement costs more; requeue at its true cost
                self.heap.push(Candidate { cost, ..c });
                continue;
            }
            let q = self.quadrics[a as usize] + self.quadrics[b as usize];
            let endpoint_costs = [
                quadric_cost(&q, &self.vertices[a as usize]),
                quadric_cost(&q, &self.vertices[b as usize]),
            ];
            let b_faces = std::mem::take(&mut self.vertex_faces[b as usize]);
            for f in b_faces {
                let Some(face) = self.faces[f] else { continue };
                if !face.contains(&b) {
                    continue;
                }
                if face.contains(&a) {
                    self.faces[f] = None;
                    self.live_faces -= 1;
                } else {
                    self.faces[f] = Some(face.map(|u| if u == b { a } else { u }));
                    self.vertex_faces[a as usize].push(f);
                }
            }
            let faces_a = &mut self.vertex_faces[a as usize];
            faces_a.sort_unstable();
            faces_a.dedup();
            let faces = &self.faces;
            faces_a.retain(|&f| faces[f].is_some());
            self.vertices[a as usize] = position;
            self.quadrics[a as usize] = q;
            self.alive[b as usize] = false;
            self.version[a as usize] += 1;
            self.collapsed_since_retry = true;
            let mut around: Vec<u32> = self.neighbors(a).into_iter().collect();
            around.sort_unstable();
            for u in around {
                self.push_edge(a, u);
            }
            return Some(Collapse {
                kept: a,
                removed: b,
                position,
                cost,
                endpoint_costs,
                optimal: rank == 0,
                faces_after: self.live_faces,
            });
        }
    }

    pub fn finish(self) -> TriangleMesh {
        let mut mesh = TriangleMesh::new(self.vertices, self.faces.into_iter().flatten().collect());
        mesh.compact();
        mesh
    }
}

/// Collapses edges until at most `target_faces` remain or nothing more can go.
pub fn decimate(mesh: &TriangleMesh, target_faces: usize) -> Result<TriangleMesh> {
    if target_faces < MIN_TARGET_FACES {
        return Err(Error::validation(format!(
            "target face count {target_faces} is below {MIN_TARGET_FACES}"
        )));
    }
    let mut d = Decimator::new(mesh)?;
    while d.face_count() > target_faces {
        if d.step().is_none() {
            break;
        }
    }
    Ok(d.finish())
}

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Faces with area at or below this are dropped on load.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Indexed triangle set with optional per-vertex colors in [0,1].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub faces: Vec<[u32; 3]>,
    pub colors: Option<Vec<[f64; 3]>>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vector3<f64>>, faces: Vec<[u32; 3]>) -> Self {
        Self {
            vertices,
            faces,
            colors: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn triangle(&self, f: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.faces[f];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.triangle(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        for (i, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&v| v as usize >= n) {
                return Err(Error::validation(format!(
                    "face {i} references vertex beyond count {n}"
                )));
            }
        }
        if let Some(c) = &self.colors {
            if c.len() != n {
                return Err(Error::validation("color count differs from vertex count"));
            }
        }
        Ok(())
    }

    /// Removes faces with area ≤ [`DEGENERATE_AREA`] (including repeated
    /// indices); returns how many were dropped.
    pub fn drop_degenerate_faces(&mut self) -> usize {
        let before = self.faces.len();
        let verts = &self.vertices;
        self.faces.retain(|&[a, b, c]| {
            if a == b || b == c || a == c {
                return false;
            }
            let (a, b, c) = (verts[a as usize], verts[b as usize], verts[c as usize]);
            0.5 * (b - a).cross(&(c - a)).norm() > DEGENERATE_AREA
        });
        before - self.faces.len()
    }

    pub fn bounds(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(lo, hi), v| (lo.inf(v), hi.sup(v))),
        )
    }

    /// Signed enclosed volume (positive for outward-oriented closed meshes).
    pub fn signed_volume(&self) -> f64 {
        (0..self.faces.len())
            .map(|f| {
                let [a, b, c] = self.triangle(f);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    /// Undirected edge → number of incident faces.
    pub fn edge_face_counts(&self) -> HashMap<(u32, u32), usize> {
        let mut counts = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Every edge shared by exactly two faces.
    pub fn is_closed(&self) -> bool {
        !self.faces.is_empty() && self.edge_face_counts().values().all(|&c| c == 2)
    }

    /// Face indices grouped by vertex-connected component, in order of each
    /// component's first face.
    pub fn components(&self) -> Vec<Vec<usize>> {
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        for f in &self.faces {
            for k in 1..3 {
                let (a, b) = (find(&mut parent, f[0] as usize), find(&mut parent, f[k] as usize));
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut slot = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            let root = find(&mut parent, f[0] as usize);
            let k = *slot.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[k].push(i);
        }
        out
    }

    /// Drops vertices no face references and renumbers.
    pub fn compact(&mut self) {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut verts = Vec::new();
        let mut colors = self.colors.as_ref().map(|_| Vec::new());
        for f in &mut self.faces {
            for v in f.iter_mut() {
                let old = *v as usize;
                if remap[old] == u32::MAX {
                    remap[old] = verts.len() as u32;
                    verts.push(self.vertices[old]);
                    if let (Some(out), Some(src)) = (colors.as_mut(), self.colors.as_ref()) {
                        out.push(src[old]);
                    }
                }
                *v = remap[old];
            }
        }
        self.vertices = verts;
        self.colors = colors;
    }
}

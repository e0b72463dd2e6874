//! Surface distances between meshes.

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::types::TriangleMesh;

/// Closest point on triangle `abc` to `p` (Ericson, Real-Time Collision Detection 5.1.5).
pub fn closest_point_on_triangle(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>,
                                 c: &Vector3<f64>) -> Vector3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

pub fn point_triangle_distance(p: &Vector3<f64>, tri: &[Vector3<f64>; 3]) -> f64 {
    (p - closest_point_on_triangle(p, &tri[0], &tri[1], &tri[2])).norm()
}

/// Barycentric lattice samples: every face is split so that no lattice edge is
/// longer than `spacing`. Includes vertices and edge points.
pub fn sample_surface(mesh: &TriangleMesh, spacing: f64) -> Vec<Vector3<f64>> {
    assert!(spacing > 0.0, "sample spacing must be positive");
    let mut out = Vec::new();
    for f in 0..mesh.faces.len() {
        let [a, b, c] = mesh.triangle(f);
        let longest = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        let k = ((longest / spacing).ceil() as usize).max(1);
        for i in 0..=k {
            for j in 0..=k - i {
                let (u, v) = (i as f64 / k as f64, j as f64 / k as f64);
                out.push(a + (b - a) * u + (c - a) * v);
            }
        }
    }
    out
}

/// Uniform grid over triangle bounding boxes for nearest-surface queries.
pub struct TriangleGrid {
    tris: Vec<[Vector3<f64>; 3]>,
    lo: Vector3<f64>,
    cell: f64,
    dims: [usize; 3],
    cells: Vec<Vec<u32>>,
}

impl TriangleGrid {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let tris: Vec<_> = (0..mesh.faces.len()).map(|f| mesh.triangle(f)).collect();
        let (lo, hi) = mesh.bounds().unwrap_or((Vector3::zeros(), Vector3::zeros()));
        let extent = (hi - lo).max().max(1e-9);
        let target = (tris.len() as f64).cbrt().ceil().clamp(1.0, 128.0);
        let cell = extent / target;
        let dims = [0, 1, 2].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).max(1));
        let mut cells = vec![Vec::new(); dims[0] * dims[1] * dims[2]];
        let mut grid = Self { tris: Vec::new(), lo, cell, dims, cells: Vec::new() };
        for (t, tri) in tris.iter().enumerate() {
            let tlo = tri[0].inf(&tri[1]).inf(&tri[2]);
            let thi = tri[0].sup(&tri[1]).sup(&tri[2]);
            let (c0, c1) = (grid.cell_of(&tlo), grid.cell_of(&thi));
            for z in c0[2]..=c1[2] {
                for y in c0[1]..=c1[1] {
                    for x in c0[0]..=c1[0] {
                        cells[x + dims[0] * (y + dims[1] * z)].push(t as u32);
                    }
                }
            }
        }
        grid.tris = tris;
        grid.cells = cells;
        grid
    }

    fn cell_of(&self, p: &Vector3<f64>) -> [usize; 3] {
        [0, 1, 2].map(|k| {
            let c = ((p[k] - self.lo[k]) / self.cell).floor();
            (c.max(0.0) as usize).min(self.dims[k] - 1)
        })
    }

    /// Distance from `p` to the nearest triangle; infinite for an empty mesh.
    pub fn distance(&self, p: &Vector3<f64>) -> f64 {
        if self.tris.is_empty() {
            return f64::INFINITY;
        }
        let c = self.cell_of(p);
        let max_ring = *self.dims.iter().max().expect("three dims");
        let mut best = f64::INFINITY;
        for r in 0..=max_ring {
            let lo = c.map(|v| v.saturating_sub(r));
            let hi = [0, 1, 2].map(|k| (c[k] + r).min(self.dims[k] - 1));
            for z in lo[2]..=hi[2] {
                for y in lo[1]..=hi[1] {
                    for x in lo[0]..=hi[0] {
                        let ring = (x.abs_diff(c[0])).max(y.abs_diff(c[1])).max(z.abs_diff(c[2]));
                        if ring != r {
                            continue;
                        }
                        for &t in &self.cells[x + self.dims[0] * (y + self.dims[1] * z)] {
                            best = best.min(point_triangle_distance(p, &self.tris[t as usize]));
                        }
                    }
                }
            }
            // anything in ring r+1 or beyond is at least r cells away
            if best <= r as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Largest distance from samples of `from` to the surface of `to`.
pub fn one_sided_hausdorff(from: &TriangleMesh, to: &TriangleMesh, spacing: f64) -> f64 {
    let grid = TriangleGrid::new(to);
    sample_surface(from, spacing)
        .par_iter()
        .map(|p| grid.distance(p))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric sampled Hausdorff distance.
pub fn hausdorff_distance(a: &TriangleMesh, b: &TriangleMesh, spacing: f64) -> f64 {
    one_sided_hausdorff(a, b, spacing).max(one_sided_hausdorff(b, a, spacing))
}

//! Binned surface-area-heuristic BVH over primitive 3σ bounds.

use nalgebra::Vector3;

use super::world::{Aabb, WorldGaussians};

pub const SAH_BINS: usize = 16;
pub const MAX_LEAF_SIZE: usize = 4;
/// Cost of visiting an interior node, in units of one primitive test.
pub const TRAVERSAL_COST: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvhNode {
    pub bounds: Aabb,
    /// Leaf: first slot in `Bvh::indices`. Interior: left child.
    pub first: u32,
    /// Leaf primitive count; 0 for interior nodes.
    pub count: u32,
    /// Right child for interior nodes.
    pub right: u32,
}

impl BvhNode {
    pub fn is_leaf(&self) -> bool {
        self.count > 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct Bvh {
    pub nodes: Vec<BvhNode>,
    /// Primitive indices referenced by leaves.
    pub indices: Vec<u32>,
}

#[derive(Clone, Copy)]
struct Bin {
    bounds: Aabb,
    count: usize,
}

impl Bvh {
    /// Empty input yields an empty tree.
    pub fn build(world: &WorldGaussians) -> Bvh {
        let mut bvh = Bvh {
            nodes: Vec::new(),
            indices: (0..world.len() as u32).collect(),
        };
        if world.is_empty() {
            return bvh;
        }
        let centroids: Vec<Vector3<f64>> = world.items.iter().map(|g| g.bounds.centroid()).collect();
        bvh.nodes.push(BvhNode {
            bounds: Aabb::empty(),
            first: 0,
            count: 0,
            right: 0,
        });
        bvh.build_node(0, 0, world.len(), world, &centroids);
        bvh
    }

    pub fn root(&self) -> Option<&BvhNode> {
        self.nodes.first()
    }

    fn build_node(&mut self, node: usize, start: usize, end: usize, world: &WorldGaussians, centroids: &[Vector3<f64>]) {
        let bounds = self.indices[start..end]
            .iter()
            .fold(Aabb::empty(), |b, &i| b.union(&world.items[i as usize].bounds));
        self.nodes[node].bounds = bounds;
        let n = end - start;
        if n == 1 {
            self.make_leaf(node, start, n);
            return;
        }
        let sah = self.sah_split(start, end, world, centroids);
        if n <= MAX_LEAF_SIZE {
            // small nodes split only when SAH says it pays
            let leaf_cost = n as f64 * bounds.surface_area();
            match sah {
                Some((s, cost)) if cost + TRAVERSAL_COST * bounds.surface_area() < leaf_cost => {
                    return self.split_at(node, start, s, end, world, centroids);
                }
                _ => {
                    self.make_leaf(node, start, n);
                    return;
                }
            }
        }
        let split = match sah {
            Some((s, _)) => s,
            None => self.median_split(start, end, centroids),
        };
        self.split_at(node, start, split, end, world, centroids);
    }

    fn split_at(&mut self, node: usize, start: usize, split: usize, end: usize, world: &WorldGaussians,
                centroids: &[Vector3<f64>]) {
        let left = self.nodes.len();
        self.nodes.push(BvhNode { bounds: Aabb::empty(), first: 0, count: 0, right: 0 });
        let right = self.nodes.len();
        self.nodes.push(BvhNode { bounds: Aabb::empty(), first: 0, count: 0, right: 0 });
        self.nodes[node].first = left as u32;
        self.nodes[node].right = right as u32;
        self.build_node(left, start, split, world, centroids);
        self.build_node(right, split, end, world, centroids);
    }

    fn make_leaf(&mut self, node: usize, start: usize, n: usize) {
        self.nodes[node].first = start as u32;
        self.nodes[node].count = n as u32;
    }

    /// Partitions `indices[start..end]`; returns the split point and its SAH
    /// cost if a non-degenerate split exists.
    fn sah_split(&mut self, start: usize, end: usize, world: &WorldGaussians,
                 centroids: &[Vector3<f64>]) -> Option<(usize, f64)> {
        let cb = self.indices[start..end].iter().fold(Aabb::empty(), |b, &i| {
            let c = centroids[i as usize];
            b.union(&Aabb { min: c, max: c })
        });
        let extent = cb.max - cb.min;
        let axis = extent.imax();
        if !(extent[axis] > 0.0) {
            return None;
        }
        let scale = SAH_BINS as f64 / extent[axis];
        let bin_of = |i: u32| -> usize {
            (((centroids[i as usize][axis] - cb.min[axis]) * scale) as usize).min(SAH_BINS - 1)
        };
        let mut bins = [Bin { bounds: Aabb::empty(), count: 0 }; SAH_BINS];
        for &i in &self.indices[start..end] {
            let b = &mut bins[bin_of(i)];
            b.count += 1;
            b.bounds = b.bounds.union(&world.items[i as usize].bounds);
        }
        // sweep: cost of splitting after bin k
        let mut right_area = [0.0; SAH_BINS];
        let mut right_count = [0usize; SAH_BINS];
        let (mut acc, mut cnt) = (Aabb::empty(), 0);
        for k in (1..SAH_BINS).rev() {
            acc = acc.union(&bins[k].bounds);
            cnt += bins[k].count;
            right_area[k] = acc.surface_area();
            right_count[k] = cnt;
        }
        let (mut acc, mut cnt) = (Aabb::empty(), 0);
        let mut best: Option<(f64, usize)> = None;
        for k in 0..SAH_BINS - 1 {
            acc = acc.union(&bins[k].bounds);
            cnt += bins[k].count;
            if cnt == 0 || right_count[k + 1] == 0 {
                continue;
            }
            let cost = acc.surface_area() * cnt as f64 + right_area[k + 1] * right_count[k + 1] as f64;
            if best.is_none_or(|(c, _)| cost < c) {
                best = Some((cost, k));
            }
        }
        let (cost, k) = best?;
        let slice = &mut self.indices[start..end];
        let mut mid = 0;
        for j in 0..slice.len() {
            if bin_of(slice[j]) <= k {
                slice.swap(j, mid);
                mid += 1;
            }
        }
        Some((start + mid, cost))
    }

    fn median_split(&mut self, start: usize, end: usize, centroids: &[Vector3<f64>]) -> usize {
        let slice = &mut self.indices[start..end];
        let cb = slice.iter().fold(Aabb::empty(), |b, &i| {
            let c = centroids[i as usize];
            b.union(&Aabb { min: c, max: c })
        });
        let axis = (cb.max - cb.min).imax();
        slice.sort_by(|&a, &b| {
            centroids[a as usize][axis]
                .total_cmp(&centroids[b as usize][axis])
                .then(a.cmp(&b))
        });
        start + slice.len() / 2
    }

    /// Indices of primitives whose bounds the ray enters within `[0, t_max]`.
    pub fn gather(&self, world: &WorldGaussians, origin: &Vector3<f64>, inv_dir: &Vector3<f64>,
                  t_max: f64, out: &mut Vec<u32>) {
        if self.nodes.is_empty() {
            return;
        }
        let mut stack = Vec::with_capacity(64);
        stack.push(0u32);
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n as usize];
            if !node.bounds.hit(origin, inv_dir, t_max) {
                continue;
            }
            if node.is_leaf() {
                for &i in &self.indices[node.first as usize..(node.first + node.count) as usize] {
                    if world.items[i as usize].bounds.hit(origin, inv_dir, t_max) {
                        out.push(i);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.first);
            }
        }
    }

    /// Leaf primitive indices in traversal order.
    pub fn leaf_indices(&self) -> Vec<u32> {
        self.nodes
            .iter()
            .filter(|n| n.is_leaf())
            .flat_map(|n| self.indices[n.first as usize..(n.first + n.count) as usize].iter().copied())
            .collect()
    }
}

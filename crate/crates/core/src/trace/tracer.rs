use std::collections::BTreeMap;
use std::sync::Arc;

use super::bvh::Bvh;
use super::ray::{ray_gaussian_peak, Ray};
use super::world::WorldGaussians;
use crate::error::{Error, Result};
use crate::raster::{ALPHA_MAX, TRANSMITTANCE_MIN};

/// Outcome of compositing along one ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceResult {
    /// Alpha-renormalized expected depth when a surface was declared.
    pub depth: Option<f64>,
    pub accumulated_alpha: f64,
}

/// Composites the gathered `candidates` front-to-back by peak position.
pub fn composite_ray(world: &WorldGaussians, ray: &Ray, candidates: &[u32], alpha_threshold: f64) -> TraceResult {
    let mut peaks: Vec<(f64, u32, f64)> = candidates
        .iter()
        .map(|&i| {
            let (t, r) = ray_gaussian_peak(ray, &world.items[i as usize]);
            (t, i, r)
        })
        .collect();
    peaks.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let transmittance_min = TRANSMITTANCE_MIN as f64;
    let mut t_acc = 1.0f64;
    let mut depth = 0.0f64;
    for (t, _, response) in peaks {
        let alpha = response.min(ALPHA_MAX as f64);
        depth += t * alpha * t_acc;
        t_acc *= 1.0 - alpha;
        if t_acc < transmittance_min {
            break;
        }
    }
    let acc = 1.0 - t_acc;
    TraceResult {
        depth: (acc >= alpha_threshold && acc > 0.0).then(|| depth / acc),
        accumulated_alpha: acc,
    }
}

/// A way of finding the primitives a ray can meet.
pub trait RayTracer: Send + Sync {
    fn name(&self) -> &'static str;
    fn world(&self) -> &WorldGaussians;
    fn gather(&self, ray: &Ray, out: &mut Vec<u32>);

    fn trace(&self, ray: &Ray, alpha_threshold: f64) -> TraceResult {
        let mut cand = Vec::new();
        self.gather(ray, &mut cand);
        composite_ray(self.world(), ray, &cand, alpha_threshold)
    }
}

pub struct BvhTracer {
    world: Arc<WorldGaussians>,
    bvh: Bvh,
}

impl BvhTracer {
    pub fn new(world: Arc<WorldGaussians>) -> Self {
        let bvh = Bvh::build(&world);
        Self { world, bvh }
    }

    pub fn bvh(&self) -> &Bvh {
        &self.bvh
    }
}

impl RayTracer for BvhTracer {
    fn name(&self) -> &'static str {
        "bvh"
    }

    fn world(&self) -> &WorldGaussians {
        &self.world
    }

    fn gather(&self, ray: &Ray, out: &mut Vec<u32>) {
        self.bvh
            .gather(&self.world, &ray.origin, &ray.inv_direction(), ray.t_max, out);
    }
}

/// Tests every primitive's bounds; the reference for [`BvhTracer`].
pub struct LinearTracer {
    world: Arc<WorldGaussians>,
}

impl LinearTracer {
    pub fn new(world: Arc<WorldGaussians>) -> Self {
        Self { world }
    }
}

impl RayTracer for LinearTracer {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn world(&self) -> &WorldGaussians {
        &self.world
    }

    fn gather(&self, ray: &Ray, out: &mut Vec<u32>) {
        let inv = ray.inv_direction();
        out.extend(
            self.world
                .items
                .iter()
                .enumerate()
                .filter(|(_, g)| g.bounds.hit(&ray.origin, &inv, ray.t_max))
                .map(|(i, _)| i as u32),
        );
    }
}

pub type TracerFactory = fn(Arc<WorldGaussians>) -> Box<dyn RayTracer>;

/// Tracer backends by name.
#[derive(Clone)]
pub struct TracerRegistry {
    entries: BTreeMap<&'static str, TracerFactory>,
}

impl Default for TracerRegistry {
    fn default() -> Self {
        let mut r = Self {
            entries: BTreeMap::new(),
        };
        r.register("bvh", |w| Box::new(BvhTracer::new(w)));
        r.register("linear", |w| Box::new(LinearTracer::new(w)));
        r
    }
}

impl TracerRegistry {
    pub fn register(&mut self, name: &'static str, factory: TracerFactory) {
        self.entries.insert(name, factory);
    }

    pub fn build(&self, name: &str, world: Arc<WorldGaussians>) -> Result<Box<dyn RayTracer>> {
        let f = self.entries.get(name).ok_or_else(|| Error::Unknown {
            kind: "tracer",
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        Ok(f(world))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

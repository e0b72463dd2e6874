//! Ray tracing against Gaussian primitives for LiDAR simulation.

mod bvh;
mod lidar;
mod ray;
mod tracer;
mod world;

pub use bvh::{Bvh, BvhNode, MAX_LEAF_SIZE, SAH_BINS, TRAVERSAL_COST};
pub use lidar::{scan, LidarModel, LidarPoint, PointCloud};
pub use ray::{ray_gaussian_peak, Ray};
pub use tracer::{
    composite_ray, BvhTracer, LinearTracer, RayTracer, TraceResult, TracerFactory, TracerRegistry,
};
pub use world::{Aabb, WorldGaussian, WorldGaussians, MIN_TRACE_SCALE};

use crate::types::{GaussianField, NodePoses};

/// Builds the BVH for `field` placed by `poses`.
pub fn build_bvh(field: &GaussianField, poses: &NodePoses) -> (WorldGaussians, Bvh) {
    let world = WorldGaussians::from_field(field, poses);
    let bvh = Bvh::build(&world);
    (world, bvh)
}

/// Traces one ray through a prebuilt BVH.
pub fn trace(bvh: &Bvh, world: &WorldGaussians, ray: &Ray, alpha_threshold: f64) -> TraceResult {
    let mut cand = Vec::new();
    bvh.gather(world, &ray.origin, &ray.inv_direction(), ray.t_max, &mut cand);
    composite_ray(world, ray, &cand, alpha_threshold)
}

//! Sensor simulation over Gaussian-splat scenes.
//!
//! Renders RGB-D images with a tile-based splat rasterizer, simulates LiDAR by
//! ray tracing Gaussian primitives through a BVH, converts between triangle
//! meshes and Gaussian fields, plays back node pose streams, and applies
//! image-space randomization for training data.

pub mod augment;
pub mod error;
pub mod image;
pub mod io;
pub mod raster;
pub mod scene;
pub mod synth;
pub mod trace;
pub mod transfer;
pub mod types;

pub use error::{Error, Result};

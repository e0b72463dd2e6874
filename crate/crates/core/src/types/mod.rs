//! Domain types shared by every subsystem.

mod mesh;
mod node;
mod pose_stream;
mod primitive;
mod transform;

pub use mesh::{TriangleMesh, DEGENERATE_AREA};
pub use node::{NodeKind, SceneNode};
pub use pose_stream::{PoseRecord, PoseStream};
pub use primitive::{
    sh_coeff_count, transform_primitives, GaussianField, GaussianPrimitive, NodePoses, NodeRange,
    MAX_SH_COEFFS, MAX_SH_DEGREE, ROTATION_NORM_TOL, SH_C0,
};
pub use transform::{PoseDoc, RigidTransform};

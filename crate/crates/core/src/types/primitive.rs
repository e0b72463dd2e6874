use std::collections::BTreeMap;
use std::ops::Range;

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};

use super::RigidTransform;
use crate::error::{Error, Result};

/// Zeroth-order real spherical-harmonic basis constant, `1 / (2 sqrt(pi))`.
pub const SH_C0: f64 = 0.282_094_791_773_878_14;
/// Coefficients per channel at degree 3.
pub const MAX_SH_COEFFS: usize = 16;
pub const MAX_SH_DEGREE: u8 = 3;

/// Tolerance on `|rotation| - 1` accepted without renormalizing.
pub const ROTATION_NORM_TOL: f64 = 1e-6;

/// Number of SH coefficients per channel for a degree.
pub fn sh_coeff_count(degree: u8) -> usize {
    let d = degree as usize + 1;
    d * d
}

/// One anisotropic 3D Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPrimitive {
    pub mean: Vector3<f64>,
    /// Standard deviations along the local axes, meters.
    pub scale: Vector3<f64>,
    /// `(w,x,y,z)`, unit within [`ROTATION_NORM_TOL`].
    pub rotation: Quaternion<f64>,
    pub opacity: f64,
    /// `sh[k][channel]`; entries beyond the field's degree are zero.
    pub sh: [[f64; 3]; MAX_SH_COEFFS],
}

impl Default for GaussianPrimitive {
    fn default() -> Self {
        Self {
            mean: Vector3::zeros(),
            scale: Vector3::repeat(1.0),
            rotation: Quaternion::identity(),
            opacity: 0.5,
            sh: [[0.0; 3]; MAX_SH_COEFFS],
        }
    }
}

impl GaussianPrimitive {
    pub fn isotropic(mean: Vector3<f64>, scale: f64, opacity: f64, rgb: [f64; 3]) -> Self {
        let mut p = Self {
            mean,
            scale: Vector3::repeat(scale),
            opacity,
            ..Default::default()
        };
        p.set_base_color(rgb);
        p
    }

    /// Sets the degree-0 coefficient so that a view-independent render gives `rgb`.
    pub fn set_base_color(&mut self, rgb: [f64; 3]) {
        for c in 0..3 {
            self.sh[0][c] = (rgb[c] - 0.5) / SH_C0;
        }
    }

    pub fn unit_rotation(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::from_quaternion(self.rotation)
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        self.unit_rotation().to_rotation_matrix().into_inner()
    }

    /// `R diag(s^2) R^T` in the primitive's storage frame.
    pub fn covariance(&self) -> Matrix3<f64> {
        let r = self.rotation_matrix();
        let s2 = Matrix3::from_diagonal(&self.scale.component_mul(&self.scale));
        r * s2 * r.transpose()
    }

    pub fn validate(&self, index: usize) -> Result<()> {
        let finite = self.mean.iter().all(|v| v.is_finite())
            && self.scale.iter().all(|v| v.is_finite())
            && self.rotation.coords.iter().all(|v| v.is_finite())
            && self.opacity.is_finite()
            && self.sh.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::validation(format!(
                "primitive {index}: non-finite attribute"
            )));
        }
        if self.scale.iter().any(|&s| s <= 0.0) {
            return Err(Error::validation(format!(
                "primitive {index}: scale must be strictly positive"
            )));
        }
        if !(self.opacity > 0.0 && self.opacity < 1.0) {
            return Err(Error::validation(format!(
                "primitive {index}: opacity {} outside (0,1)",
                self.opacity
            )));
        }
        if (self.rotation.norm() - 1.0).abs() > ROTATION_NORM_TOL {
            return Err(Error::validation(format!(
                "primitive {index}: rotation is not unit"
            )));
        }
        Ok(())
    }
}

/// Contiguous primitive range owned by a scene node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRange {
    pub id: String,
    pub range: Range<usize>,
}

/// Indexed collection of primitives partitioned into node ranges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaussianField {
    pub primitives: Vec<GaussianPrimitive>,
    pub sh_degree: u8,
    pub node_ranges: Vec<NodeRange>,
}

impl GaussianField {
    pub fn new(sh_degree: u8) -> Self {
        Self {
            primitives: Vec::new(),
            sh_degree,
            node_ranges: Vec::new(),
        }
    }

    pub fn from_primitives(sh_degree: u8, primitives: Vec<GaussianPrimitive>) -> Self {
        Self {
            primitives,
            sh_degree,
            node_ranges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    /// Appends `other`'s primitives as a new node range. The field's SH degree is
    /// raised to the larger of the two; coefficients above a source degree are zero.
    pub fn append_node(&mut self, id: &str, other: &GaussianField) -> Result<Range<usize>> {
        if self.node_ranges.iter().any(|n| n.id == id) {
            return Err(Error::validation(format!("duplicate node id '{id}'")));
        }
        let start = self.primitives.len();
        self.primitives.extend(other.primitives.iter().cloned());
        self.sh_degree = self.sh_degree.max(other.sh_degree);
        let range = start..self.primitives.len();
        self.node_ranges.push(NodeRange {
            id: id.to_string(),
            range: range.clone(),
        });
        Ok(range)
    }

    pub fn node_range(&self, id: &str) -> Option<Range<usize>> {
        self.node_ranges
            .iter()
            .find(|n| n.id == id)
            .map(|n| n.range.clone())
    }

    /// Checks primitive invariants, SH degree consistency, and range disjointness.
    pub fn validate(&self) -> Result<()> {
        if self.sh_degree > MAX_SH_DEGREE {
            return Err(Error::validation(format!(
                "sh degree {} exceeds {MAX_SH_DEGREE}",
                self.sh_degree
            )));
        }
        let used = sh_coeff_count(self.sh_degree);
        for (i, p) in self.primitives.iter().enumerate() {
            p.validate(i)?;
            if p.sh[used..].iter().flatten().any(|&v| v != 0.0) {
                return Err(Error::validation(format!(
                    "primitive {i}: coefficients beyond degree {}",
                    self.sh_degree
                )));
            }
        }
        let mut ranges: Vec<&Range<usize>> = self.node_ranges.iter().map(|n| &n.range).collect();
        ranges.sort_by_key(|r| r.start);
        for w in ranges.windows(2) {
            if w[0].end > w[1].start {
                return Err(Error::validation("node ranges overlap"));
            }
        }
        if let Some(last) = ranges.last() {
            if last.end > self.primitives.len() {
                return Err(Error::validation("node range exceeds primitive count"));
            }
        }
        Ok(())
    }

    /// Axis-aligned bounds of the primitive means, or `None` when empty.
    pub fn mean_bounds(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        let first = self.primitives.first()?.mean;
        Some(self.primitives.iter().fold((first, first), |(lo, hi), p| {
            (lo.inf(&p.mean), hi.sup(&p.mean))
        }))
    }

    /// Pose applied to each primitive: its node's pose, identity when unowned.
    pub fn per_primitive_poses(&self, poses: &NodePoses) -> Vec<RigidTransform> {
        let mut out = vec![RigidTransform::identity(); self.primitives.len()];
        for node in &self.node_ranges {
            let pose = poses.get(&node.id);
            for slot in &mut out[node.range.clone()] {
                *slot = pose;
            }
        }
        out
    }
}

/// Node id → world pose. Missing nodes are treated as identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodePoses(pub BTreeMap<String, RigidTransform>);

impl NodePoses {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: impl Into<String>, pose: RigidTransform) {
        self.0.insert(id.into(), pose);
    }

    pub fn get(&self, id: &str) -> RigidTransform {
        self.0.get(id).copied().unwrap_or_default()
    }

    /// Left-composes `t` onto every pose (moves the whole scene rigidly).
    pub fn premultiplied(&self, t: &RigidTransform) -> NodePoses {
        NodePoses(self.0.iter().map(|(k, v)| (k.clone(), t.compose(v))).collect())
    }
}

/// Maps the primitives in `range` by `transform`: means are transformed as
/// points, rotations are left-multiplied, scales and SH are untouched.
pub fn transform_primitives(
    field: &mut GaussianField,
    range: Range<usize>,
    transform: &RigidTransform,
) -> Result<()> {
    if range.start > range.end || range.end > field.primitives.len() {
        return Err(Error::validation(format!(
            "range {range:?} outside field of {} primitives",
            field.primitives.len()
        )));
    }
    let q = *transform.rotation.quaternion();
    for p in &mut field.primitives[range] {
        p.mean = transform.transform_point(&p.mean);
        p.rotation = q * p.rotation;
    }
    Ok(())
}

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RigidTransform;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PoseRecord {
    pub t: f64,
    pub node: String,
    pub pose: RigidTransform,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordDoc {
    t: f64,
    node: String,
    p: [f64; 3],
    q: [f64; 4],
}

/// Timestamped node poses, one JSON object per line:
/// `{"t": <sec>, "node": "<id>", "p": [x,y,z], "q": [w,x,y,z]}`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PoseStream {
    records: Vec<PoseRecord>,
    by_node: BTreeMap<String, Vec<usize>>,
}

impl PoseStream {
    pub fn new(records: Vec<PoseRecord>) -> Result<Self> {
        let mut by_node: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if !r.t.is_finite() {
                return Err(Error::validation(format!("record {i}: non-finite timestamp")));
            }
            let idx = by_node.entry(r.node.clone()).or_default();
            if let Some(&prev) = idx.last() {
                if records[prev].t > r.t {
                    return Err(Error::validation(format!(
                        "record {i}: timestamp {} decreases for node '{}'",
                        r.t, r.node
                    )));
                }
            }
            idx.push(i);
        }
        Ok(Self { records, by_node })
    }

    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut records = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<pose stream>", e))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let doc: RecordDoc = serde_json::from_str(line)
                .map_err(|e| Error::format(format!("pose stream line {}: {e}", lineno + 1)))?;
            let pose = RigidTransform::from_wxyz(doc.q, doc.p).ok_or_else(|| {
                Error::validation(format!("pose stream line {}: degenerate pose", lineno + 1))
            })?;
            records.push(PoseRecord {
                t: doc.t,
                node: doc.node,
                pose,
            });
        }
        Self::new(records)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(std::io::BufReader::new(file))
    }

    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let doc = RecordDoc {
                t: r.t,
                node: r.node.clone(),
                p: [r.pose.translation.x, r.pose.translation.y, r.pose.translation.z],
                q: r.pose.wxyz(),
            };
            out.push_str(&serde_json::to_string(&doc).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn records(&self) -> &[PoseRecord] {
        &self.records
    }

    pub fn node_ids(&self) -> BTreeSet<&str> {
        self.by_node.keys().map(String::as_str).collect()
    }

    /// Pose of `node` at `t`: interpolated between bracketing records, the last
    /// record held after the stream ends, `None` before the first record.
    pub fn sample(&self, node: &str, t: f64) -> Option<RigidTransform> {
        let idx = self.by_node.get(node)?;
        let first = &self.records[idx[0]];
        if t < first.t {
            return None;
        }
        // last record with timestamp <= t
        let pos = idx.partition_point(|&i| self.records[i].t <= t);
        let lo = &self.records[idx[pos - 1]];
        match idx.get(pos) {
            None => Some(lo.pose),
            Some(&hi_i) => {
                let hi = &self.records[hi_i];
                let span = hi.t - lo.t;
                if span <= 0.0 {
                    return Some(hi.pose);
                }
                Some(lo.pose.interpolate(&hi.pose, (t - lo.t) / span))
            }
        }
    }
}

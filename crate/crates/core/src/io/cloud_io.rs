//! LiDAR point clouds as PLY (ASCII or binary) and PCD v0.7.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::PointCloud;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudEncoding {
    Ascii,
    Binary,
}

pub fn encode_cloud_ply(cloud: &PointCloud, encoding: CloudEncoding) -> Vec<u8> {
    let fmt = match encoding {
        CloudEncoding::Ascii => "ascii",
        CloudEncoding::Binary => "binary_little_endian",
    };
    let mut out = format!(
        "ply\nformat {fmt} 1.0\nelement vertex {}\nproperty float x\nproperty float y\n\
         property float z\nproperty ushort ring\nproperty float azimuth\nend_header\n",
        cloud.len()
    )
    .into_bytes();
    match encoding {
        CloudEncoding::Ascii => {
            let mut s = String::new();
            for p in &cloud.points {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {}",
                    p.position[0] as f32, p.position[1] as f32, p.position[2] as f32,
                    p.ring, p.azimuth as f32
                );
            }
            out.extend_from_slice(s.as_bytes());
        }
        CloudEncoding::Binary => {
            for p in &cloud.points {
                for c in p.position {
                    out.extend_from_slice(&(c as f32).to_le_bytes());
                }
                out.extend_from_slice(&p.ring.to_le_bytes());
                out.extend_from_slice(&(p.azimuth as f32).to_le_bytes());
            }
        }
    }
    out
}

pub fn encode_cloud_pcd(cloud: &PointCloud, encoding: CloudEncoding) -> Vec<u8> {
    let n = cloud.len();
    let data = match encoding {
        CloudEncoding::Ascii => "ascii",
        CloudEncoding::Binary => "binary",
    };
    let mut out = format!(
        "# .PCD v0.7 - Point Cloud Data file format\nVERSION 0.7\nFIELDS x y z ring azimuth\n\
         SIZE 4 4 4 2 4\nTYPE F F F U F\nCOUNT 1 1 1 1 1\nWIDTH {n}\nHEIGHT 1\n\
         VIEWPOINT 0 0 0 1 0 0 0\nPOINTS {n}\nDATA {data}\n"
    )
    .into_bytes();
    match encoding {
        CloudEncoding::Ascii => {
            let mut s = String::new();
            for p in &cloud.points {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {}",
                    p.position[0] as f32, p.position[1] as f32, p.position[2] as f32,
                    p.ring, p.azimuth as f32
                );
            }
            out.extend_from_slice(s.as_bytes());
        }
        CloudEncoding::Binary => {
            for p in &cloud.points {
                for c in p.position {
                    out.extend_from_slice(&(c as f32).to_le_bytes());
                }
                out.extend_from_slice(&p.ring.to_le_bytes());
                out.extend_from_slice(&(p.azimuth as f32).to_le_bytes());
            }
        }
    }
    out
}

/// Chooses PLY or PCD from the extension.
pub fn save_cloud(cloud: &PointCloud, path: &Path, encoding: CloudEncoding) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let bytes = match ext.as_deref() {
        Some("ply") => encode_cloud_ply(cloud, encoding),
        Some("pcd") => encode_cloud_pcd(cloud, encoding),
        _ => {
            return Err(Error::format(format!(
                "unknown point cloud extension for {}",
                path.display()
            )))
        }
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

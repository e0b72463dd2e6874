//! OBJ (ASCII, `v`/`f` records only) and binary STL.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::types::TriangleMesh;

/// STL vertices closer than this (per coordinate grid) are merged.
pub const STL_WELD_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeshLoadReport {
    pub dropped_degenerate: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MeshFormat {
    Obj,
    Stl,
}

fn format_of(path: &Path) -> Result<MeshFormat> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("obj") => Ok(MeshFormat::Obj),
        Some("stl") => Ok(MeshFormat::Stl),
        other => Err(Error::format(format!(
            "unknown mesh extension {:?} for {}",
            other.unwrap_or(""),
            path.display()
        ))),
    }
}

pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    let (mesh, report) = load_mesh_with_report(path)?;
    if report.dropped_degenerate > 0 {
        log::warn!(
            "{}: dropped {} degenerate face(s)",
            path.display(),
            report.dropped_degenerate
        );
    }
    Ok(mesh)
}

pub fn load_mesh_with_report(path: &Path) -> Result<(TriangleMesh, MeshLoadReport)> {
    let fmt = format_of(path)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut mesh = match fmt {
        MeshFormat::Obj => parse_obj(
            std::str::from_utf8(&bytes).map_err(|_| Error::format("OBJ is not valid UTF-8"))?,
        )?,
        MeshFormat::Stl => parse_stl(&bytes)?,
    };
    mesh.validate()?;
    let dropped = mesh.drop_degenerate_faces();
    Ok((
        mesh,
        MeshLoadReport {
            dropped_degenerate: dropped,
        },
    ))
}

/// Parses `v x y z [r g b]` and `f i j k ...` records; polygons are fanned.
pub fn parse_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut colors: Vec<Option<[f64; 3]>> = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let nums: Vec<f64> = it
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::format(format!("OBJ line {}: bad vertex", lineno + 1)))?;
                if nums.len() < 3 {
                    return Err(Error::format(format!(
                        "OBJ line {}: vertex needs 3 coordinates",
                        lineno + 1
                    )));
                }
                vertices.push(Vector3::new(nums[0], nums[1], nums[2]));
                colors.push((nums.len() >= 6).then(|| [nums[3], nums[4], nums[5]]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| {
                        Error::format(format!("OBJ line {}: bad face index '{tok}'", lineno + 1))
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = if i < 0 { n + i } else { i - 1 };
                    if resolved < 0 || resolved >= n {
                        return Err(Error::validation(format!(
                            "OBJ line {}: face index {i} out of range",
                            lineno + 1
                        )));
                    }
                    idx.push(resolved as u32);
                }
                if idx.len() < 3 {
                    return Err(Error::format(format!(
                        "OBJ line {}: face needs 3 vertices",
                        lineno + 1
                    )));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    let colors = if !colors.is_empty() && colors.iter().all(Option::is_some) {
        Some(colors.into_iter().map(Option::unwrap).collect())
    } else {
        None
    };
    Ok(TriangleMesh {
        vertices,
        faces,
        colors,
    })
}

pub fn parse_stl(bytes: &[u8]) -> Result<TriangleMesh> {
    if bytes.len() < 84 {
        return Err(Error::format("STL shorter than 84-byte header"));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    if bytes.len() < 84 + count * 50 {
        return Err(Error::format(format!(
            "STL declares {count} triangles but holds {} bytes",
            bytes.len()
        )));
    }
    let mut weld: HashMap<[i64; 3], u32> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::with_capacity(count);
    for t in 0..count {
        let rec = &bytes[84 + t * 50..84 + (t + 1) * 50];
        let mut face = [0u32; 3];
        for (k, slot) in face.iter_mut().enumerate() {
            let off = 12 + k * 12;
            let c: [f64; 3] = std::array::from_fn(|j| {
                f32::from_le_bytes(rec[off + j * 4..off + j * 4 + 4].try_into().unwrap()) as f64
            });
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!("STL triangle {t}: non-finite vertex")));
            }
            let key = c.map(|v| (v / STL_WELD_TOLERANCE).round() as i64);
            *slot = *weld.entry(key).or_insert_with(|| {
                vertices.push(Vector3::from(c));
                (vertices.len() - 1) as u32
            });
        }
        faces.push(face);
    }
    Ok(TriangleMesh::new(vertices, faces))
}

pub fn encode_obj(mesh: &TriangleMesh) -> String {
    let mut s = String::new();
    for (i, v) in mesh.vertices.iter().enumerate() {
        match &mesh.colors {
            Some(c) => {
                let [r, g, b] = c[i];
                let _ = writeln!(s, "v {} {} {} {r} {g} {b}", v.x, v.y, v.z);
            }
            None => {
                let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
            }
        }
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}

pub fn encode_stl(mesh: &TriangleMesh) -> Vec<u8> {
    let mut out = vec![0u8; 80];
    out.extend_from_slice(&(mesh.faces.len() as u32).to_le_bytes());
    for f in 0..mesh.faces.len() {
        let tri = mesh.triangle(f);
        let n = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
        let n = n.try_normalize(0.0).unwrap_or_else(Vector3::zeros);
        for v in std::iter::once(&n).chain(tri.iter()) {
            for c in v.iter() {
                out.extend_from_slice(&(*c as f32).to_le_bytes());
            }
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

pub fn save_mesh(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let bytes = match format_of(path)? {
        MeshFormat::Obj => encode_obj(mesh).into_bytes(),
        MeshFormat::Stl => encode_stl(mesh),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_polygon_fan_and_negative_indices() {
        let m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf -4 -3 -2 -1\n").unwrap();
        assert_eq!(m.faces, vec![[0, 1, 2], [0, 2, 3]]);
    }

    #[test]
    fn obj_out_of_range_index() {
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }

    #[test]
    fn obj_vertex_colors() {
        let m = parse_obj("v 0 0 0 1 0 0\nv 1 0 0 0 1 0\nv 0 1 0 0 0 1\nf 1/1 2/2 3/3\n").unwrap();
        assert_eq!(m.colors.unwrap()[1], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn unknown_extension() {
        assert!(load_mesh(Path::new("thing.fbx")).is_err());
    }
}

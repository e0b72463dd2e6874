//! Binary little-endian splat PLY in the common 3DGS layout.
//!
//! Per vertex, float32 in order: `x y z nx ny nz f_dc_0..2 f_rest_* opacity
//! scale_0..2 rot_0..3`. Scales are stored as natural logs, opacity before the
//! sigmoid, rotation as an unnormalized `(w,x,y,z)` quaternion.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::{Quaternion, Vector3};

use crate::error::{Error, Result};
use crate::types::{
    sh_coeff_count, GaussianField, GaussianPrimitive, MAX_SH_DEGREE, ROTATION_NORM_TOL,
};

/// Loaded opacities are clamped into `[OPACITY_EPS, 1 - OPACITY_EPS]`; this keeps
/// the open-interval invariant and makes save/load a fixed point.
pub const OPACITY_EPS: f64 = 1e-7;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Property names in file order for a given SH degree.
pub fn property_names(sh_degree: u8) -> Vec<String> {
    let mut names: Vec<String> = ["x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rest = 3 * (sh_coeff_count(sh_degree) - 1);
    names.extend((0..rest).map(|i| format!("f_rest_{i}")));
    names.push("opacity".into());
    names.extend((0..3).map(|i| format!("scale_{i}")));
    names.extend((0..4).map(|i| format!("rot_{i}")));
    names
}

pub fn encode_splat_ply(field: &GaussianField) -> Result<Vec<u8>> {
    field.validate()?;
    let names = property_names(field.sh_degree);
    let mut out = Vec::with_capacity(256 + field.len() * names.len() * 4);
    out.extend_from_slice(b"ply\nformat binary_little_endian 1.0\n");
    out.extend_from_slice(format!("element vertex {}\n", field.len()).as_bytes());
    for n in &names {
        out.extend_from_slice(format!("property float {n}\n").as_bytes());
    }
    out.extend_from_slice(b"end_header\n");

    let n_rest = sh_coeff_count(field.sh_degree) - 1;
    let mut put = |v: f64| out.extend_from_slice(&(v as f32).to_le_bytes());
    for p in &field.primitives {
        for v in p.mean.iter() {
            put(*v);
        }
        for _ in 0..3 {
            put(0.0);
        }
        for c in 0..3 {
            put(p.sh[0][c]);
        }
        for c in 0..3 {
            for k in 1..=n_rest {
                put(p.sh[k][c]);
            }
        }
        put(logit(p.opacity));
        for s in p.scale.iter() {
            put(s.ln());
        }
        let q = &p.rotation;
        for v in [q.w, q.i, q.j, q.k] {
            put(v);
        }
    }
    Ok(out)
}

pub fn save_splat_ply(field: &GaussianField, path: &Path) -> Result<()> {
    let bytes = encode_splat_ply(field)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

struct Header {
    count: usize,
    properties: Vec<String>,
}

fn parse_header(reader: &mut impl BufRead) -> Result<Header> {
    let mut line = String::new();
    let mut next_line = |line: &mut String| -> Result<String> {
        line.clear();
        let n = reader
            .read_line(line)
            .map_err(|e| Error::format(format!("reading header: {e}")))?;
        if n == 0 {
            return Err(Error::format("unexpected end of file in header"));
        }
        Ok(line.trim_end_matches(['\n', '\r']).to_string())
    };
    if next_line(&mut line)? != "ply" {
        return Err(Error::format("missing 'ply' magic"));
    }
    let mut count = None;
    let mut properties = Vec::new();
    let mut in_vertex = false;
    loop {
        let l = next_line(&mut line)?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["format", fmt, _] => {
                if *fmt != "binary_little_endian" {
                    return Err(Error::format(format!(
                        "unsupported format '{fmt}', expected binary_little_endian"
                    )));
                }
            }
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, n] => {
                if *name != "vertex" {
                    return Err(Error::format(format!("unexpected element '{name}'")));
                }
                count = Some(
                    n.parse::<usize>()
                        .map_err(|_| Error::format(format!("bad vertex count '{n}'")))?,
                );
                in_vertex = true;
            }
            ["property", ty, name] if in_vertex => {
                if *ty != "float" && *ty != "float32" {
                    return Err(Error::format(format!(
                        "property '{name}' has type '{ty}', expected float"
                    )));
                }
                properties.push(name.to_string());
            }
            _ => return Err(Error::format(format!("unrecognized header line '{l}'"))),
        }
    }
    let count = count.ok_or_else(|| Error::format("missing 'element vertex'"))?;
    Ok(Header { count, properties })
}

pub fn decode_splat_ply(bytes: &[u8]) -> Result<GaussianField> {
    let mut reader = BufReader::new(bytes);
    let header = parse_header(&mut reader)?;
    let find = |name: &str| -> Result<usize> {
        header
            .properties
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::format(format!("missing property '{name}'")))
    };
    let pos = [find("x")?, find("y")?, find("z")?];
    let dc = [find("f_dc_0")?, find("f_dc_1")?, find("f_dc_2")?];
    let opacity = find("opacity")?;
    let scale = [find("scale_0")?, find("scale_1")?, find("scale_2")?];
    let rot = [find("rot_0")?, find("rot_1")?, find("rot_2")?, find("rot_3")?];

    let n_rest_props = header
        .properties
        .iter()
        .filter(|p| p.starts_with("f_rest_"))
        .count();
    let degree = (0..=MAX_SH_DEGREE)
        .find(|&d| 3 * (sh_coeff_count(d) - 1) == n_rest_props)
        .ok_or_else(|| {
            Error::format(format!(
                "{n_rest_props} f_rest properties do not match any SH degree <= {MAX_SH_DEGREE}"
            ))
        })?;
    let rest: Vec<usize> = (0..n_rest_props)
        .map(|i| find(&format!("f_rest_{i}")))
        .collect::<Result<_>>()?;
    let n_rest = sh_coeff_count(degree) - 1;

    let stride = header.properties.len();
    let mut row = vec![0u8; stride * 4];
    let mut vals = vec![0f64; stride];
    let mut field = GaussianField::new(degree);
    field.primitives.reserve(header.count);
    for i in 0..header.count {
        reader
            .read_exact(&mut row)
            .map_err(|_| Error::format(format!("truncated payload at primitive {i}")))?;
        for (v, chunk) in vals.iter_mut().zip(row.chunks_exact(4)) {
            *v = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
        }
        if let Some(bad) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "primitive {i}: non-finite value in property '{}'",
                header.properties[bad]
            )));
        }
        let mut p = GaussianPrimitive {
            mean: Vector3::new(vals[pos[0]], vals[pos[1]], vals[pos[2]]),
            scale: Vector3::new(vals[scale[0]].exp(), vals[scale[1]].exp(), vals[scale[2]].exp()),
            opacity: sigmoid(vals[opacity]).clamp(OPACITY_EPS, 1.0 - OPACITY_EPS),
            ..Default::default()
        };
        if p.scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::validation(format!(
                "primitive {i}: scale out of representable range"
            )));
        }
        let q = Quaternion::new(vals[rot[0]], vals[rot[1]], vals[rot[2]], vals[rot[3]]);
        let norm = q.norm();
        if norm < 1e-12 {
            return Err(Error::validation(format!("primitive {i}: zero rotation")));
        }
        p.rotation = if (norm - 1.0).abs() > ROTATION_NORM_TOL {
            q / norm
        } else {
            q
        };
        for c in 0..3 {
            p.sh[0][c] = vals[dc[c]];
            for k in 1..=n_rest {
                p.sh[k][c] = vals[rest[c * n_rest + k - 1]];
            }
        }
        field.primitives.push(p);
    }
    Ok(field)
}

pub fn load_splat_ply(path: &Path) -> Result<GaussianField> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_splat_ply(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(props: &[&str], count: usize) -> Vec<u8> {
        let mut h = format!("ply\nformat binary_little_endian 1.0\nelement vertex {count}\n");
        for p in props {
            h.push_str(&format!("property float {p}\n"));
        }
        h.push_str("end_header\n");
        h.into_bytes()
    }

    fn one_primitive(rot: [f32; 4]) -> Vec<u8> {
        let names = property_names(0);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut b = header(&refs, 1);
        let mut vals = vec![0f32; names.len()];
        vals[names.len() - 4..].copy_from_slice(&rot);
        for v in vals {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }

    #[test]
    fn activations_applied() {
        let f = decode_splat_ply(&one_primitive([1.0, 0.0, 0.0, 0.0])).unwrap();
        let p = &f.primitives[0];
        assert_eq!(p.scale, Vector3::new(1.0, 1.0, 1.0));
        assert_eq!(p.opacity, 0.5);
        assert_eq!(f.sh_degree, 0);
    }

    #[test]
    fn rotation_normalized() {
        let f = decode_splat_ply(&one_primitive([2.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(f.primitives[0].rotation, Quaternion::new(1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn missing_property_named() {
        let b = header(&["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "scale_0"], 0);
        let err = decode_splat_ply(&b).unwrap_err().to_string();
        assert!(err.contains("opacity"), "{err}");
    }

    #[test]
    fn odd_rest_count_rejected() {
        let mut names = property_names(0);
        names.push("f_rest_0".into());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        assert!(decode_splat_ply(&header(&refs, 0)).is_err());
    }

    #[test]
    fn non_finite_names_index() {
        let mut b = one_primitive([1.0, 0.0, 0.0, 0.0]);
        let names = property_names(0);
        let row = names.len() * 4;
        let at = b.len() - row;
        let mut bytes = b.split_off(at);
        bytes[0..4].copy_from_slice(&f32::NAN.to_le_bytes());
        b.extend(bytes);
        let err = decode_splat_ply(&b).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("primitive 0"));
    }

    #[test]
    fn empty_field_is_valid() {
        let bytes = encode_splat_ply(&GaussianField::new(0)).unwrap();
        let text = String::from_utf8_lossy(&bytes);
        assert!(text.contains("element vertex 0\n"));
        assert!(decode_splat_ply(&bytes).unwrap().is_empty());
    }

    #[test]
    fn half_opacity_stored_as_zero() {
        let f = GaussianField::from_primitives(
            0,
            vec![GaussianPrimitive::isotropic(Vector3::zeros(), 1.0, 0.5, [0.5; 3])],
        );
        let bytes = encode_splat_ply(&f).unwrap();
        let names = property_names(0);
        let op = names.iter().position(|n| n == "opacity").unwrap();
        let row = &bytes[bytes.len() - names.len() * 4..];
        assert_eq!(f32::from_le_bytes(row[op * 4..op * 4 + 4].try_into().unwrap()), 0.0);
    }
}

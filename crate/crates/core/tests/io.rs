use nalgebra::{Quaternion, Vector3};
use splatsim::io::mesh_io::{encode_obj, encode_stl, parse_obj, parse_stl};
use splatsim::io::splat_ply::property_names;
use splatsim::io::{decode_splat_ply, encode_pfm, encode_splat_ply, load_mesh_with_report, load_splat_ply, save_splat_ply};
use splatsim::synth::{cube_mesh, random_field, RandomFieldSpec};
use splatsim::types::{GaussianField, GaussianPrimitive};

const CUBE_OBJ: &str = "\
# unit cube
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 2 3 7
f 2 7 6
f 3 4 8
f 3 8 7
f 4 1 5
f 4 5 8
";

fn ply_with_one_row(sh_degree: u8, values: &[(&str, f32)]) -> Vec<u8> {
    let names = property_names(sh_degree);
    let mut out = b"ply\nformat binary_little_endian 1.0\nelement vertex 1\n".to_vec();
    for n in &names {
        out.extend_from_slice(format!("property float {n}\n").as_bytes());
    }
    out.extend_from_slice(b"end_header\n");
    for n in &names {
        let v = values.iter().find(|(k, _)| k == n).map(|(_, v)| *v).unwrap_or(0.0);
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

#[test]
fn obj_cube_loads_with_eight_vertices() {
    let mesh = parse_obj(CUBE_OBJ).unwrap();
    assert_eq!(mesh.vertices.len(), 8);
    assert_eq!(mesh.faces.len(), 12);
    assert!(mesh.is_closed());
    assert!((mesh.signed_volume() - 1.0).abs() < 1e-12);
}

#[test]
fn stl_cube_welds_to_eight_vertices() {
    let stl = encode_stl(&parse_obj(CUBE_OBJ).unwrap());
    // binary STL: 80-byte header, count, 50 bytes per triangle
    assert_eq!(stl.len(), 84 + 12 * 50);
    let mesh = parse_stl(&stl).unwrap();
    assert_eq!(mesh.faces.len(), 12);
    assert_eq!(mesh.vertices.len(), 8);
}

#[test]
fn zero_area_face_is_dropped_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.obj");
    // collinear triangle along the bottom edge
    std::fs::write(&path, format!("{CUBE_OBJ}v 0.5 0 0\nf 1 9 2\n")).unwrap();
    let (mesh, report) = load_mesh_with_report(&path).unwrap();
    assert_eq!(report.dropped_degenerate, 1);
    assert_eq!(mesh.faces.len(), 12);
}

#[test]
fn obj_round_trip_keeps_geometry() {
    let cube = cube_mesh(0.5);
    let back = parse_obj(&encode_obj(&cube)).unwrap();
    assert_eq!(back.faces, cube.faces);
    for (a, b) in back.vertices.iter().zip(&cube.vertices) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn stored_zero_activations_decode_to_unit_scale_half_opacity() {
    let bytes = ply_with_one_row(0, &[("rot_0", 2.0)]);
    let f = decode_splat_ply(&bytes).unwrap();
    let p = &f.primitives[0];
    assert_eq!(p.scale, Vector3::repeat(1.0));
    assert_eq!(p.opacity, 0.5);
    assert_eq!(p.rotation, Quaternion::new(1.0, 0.0, 0.0, 0.0));
}

#[test]
fn missing_property_is_named() {
    let text = "ply\nformat binary_little_endian 1.0\nelement vertex 0\nproperty float x\nend_header\n";
    let err = decode_splat_ply(text.as_bytes()).unwrap_err().to_string();
    assert!(err.contains("y"), "{err}");
}

#[test]
fn non_finite_value_names_the_primitive() {
    let mut bytes = ply_with_one_row(0, &[("rot_0", 1.0)]);
    let n = bytes.len();
    bytes[n - 4..].copy_from_slice(&f32::NAN.to_le_bytes());
    let err = decode_splat_ply(&bytes).unwrap_err().to_string();
    assert!(err.contains('0'), "{err}");
}

#[test]
fn half_opacity_is_stored_as_zero_logit() {
    let f = GaussianField::from_primitives(0, vec![GaussianPrimitive::isotropic(Vector3::zeros(), 1.0, 0.5, [0.5; 3])]);
    let bytes = encode_splat_ply(&f).unwrap();
    let names = property_names(0);
    let k = names.iter().position(|n| n == "opacity").unwrap();
    let body = bytes.len() - 4 * names.len();
    assert_eq!(&bytes[body + 4 * k..body + 4 * k + 4], &0f32.to_le_bytes());
}

#[test]
fn empty_field_writes_zero_count() {
    let bytes = encode_splat_ply(&GaussianField::new(0)).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert!(text.contains("element vertex 0\n"));
    assert!(text.ends_with("end_header\n"));
    assert!(decode_splat_ply(&bytes).unwrap().is_empty());
}

#[test]
fn splat_ply_double_round_trip_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    for degree in 0..=3u8 {
        let field = random_field(&RandomFieldSpec { count: 100, sh_degree: degree, ..Default::default() }, 77);
        let a = dir.path().join(format!("a{degree}.ply"));
        let b = dir.path().join(format!("b{degree}.ply"));
        save_splat_ply(&field, &a).unwrap();
        let loaded = load_splat_ply(&a).unwrap();
        assert_eq!(loaded.sh_degree, degree);
        save_splat_ply(&loaded, &b).unwrap();
        let c = encode_splat_ply(&load_splat_ply(&b).unwrap()).unwrap();
        let a_bytes = std::fs::read(&a).unwrap();
        assert_eq!(a_bytes, std::fs::read(&b).unwrap());
        assert_eq!(a_bytes, c);
    }
}

#[test]
fn pfm_is_bottom_up_little_endian() {
    let data = [1.0f32, 2.0, 3.0, 4.0, 5.0, 6.0];
    let bytes = encode_pfm(3, 2, &data);
    let header = b"Pf\n3 2\n-1.0\n";
    assert_eq!(&bytes[..header.len()], header);
    let body: Vec<f32> = bytes[header.len()..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(body, vec![4.0, 5.0, 6.0, 1.0, 2.0, 3.0]);
}

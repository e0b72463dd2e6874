use nalgebra::Vector3;
use proptest::prelude::*;
use splatsim::raster::CameraModel;
use splatsim::synth::{cube_mesh, icosphere};
use splatsim::transfer::metrics::hausdorff_distance;
use splatsim::transfer::{
    decimate, extract_mesh, gaussians_to_mesh, mesh_to_gaussians, render_depth_ring, ring_cameras, tsdf_fuse,
    FusionParams, TsdfVolume, FLATTEN_EPS,
};
use splatsim::types::{GaussianField, GaussianPrimitive, RigidTransform, TriangleMesh};

fn sphere_volume(radius: f64, n: usize) -> TsdfVolume {
    let voxel = 2.4 * radius / (n - 1) as f64;
    let origin = Vector3::repeat(-1.2 * radius);
    TsdfVolume::from_sdf(origin, voxel, [n; 3], 3.0 * voxel, |p| p.norm() - radius).unwrap()
}

fn normal_axis(p: &GaussianPrimitive) -> Vector3<f64> {
    p.rotation_matrix().column(2).into_owned()
}

#[test]
fn equilateral_triangle_primitive() {
    let h = 3f64.sqrt() / 2.0;
    let mesh = TriangleMesh::new(
        vec![Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.5, h, 0.0)],
        vec![[0, 1, 2]],
    );
    let f = mesh_to_gaussians(&mesh);
    let p = &f.primitives[0];
    assert!((p.mean - Vector3::new(0.5, 3f64.sqrt() / 6.0, 0.0)).norm() < 1e-12);
    assert!((p.scale.x - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    assert!((p.scale.y - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    assert!((normal_axis(p).z.abs() - 1.0).abs() < 1e-12);
}

#[test]
fn cube_faces_give_axis_aligned_flat_primitives() {
    let mesh = cube_mesh(0.5);
    let f = mesh_to_gaussians(&mesh);
    assert_eq!(f.len(), 12);
    for (fi, p) in f.primitives.iter().enumerate() {
        let [a, b, c] = mesh.triangle(fi);
        assert!((p.mean - (a + b + c) / 3.0).norm() < 1e-15);
        let n = normal_axis(p);
        let largest = n.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!((largest - 1.0).abs() < 1e-12, "face {fi} normal {n:?}");
        assert!((p.scale.z - FLATTEN_EPS * p.scale.x).abs() < 1e-15);
        // outward: the normal axis points away from the cube center
        assert!(n.dot(&p.mean) > 0.0);
    }
}

#[test]
fn mid_gray_vertex_colors_give_zero_dc() {
    let mut mesh = TriangleMesh::new(
        vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
        vec![[0, 1, 2]],
    );
    mesh.colors = Some(vec![[0.5; 3]; 3]);
    let f = mesh_to_gaussians(&mesh);
    assert_eq!(f.primitives[0].sh[0], [0.0; 3]);
    assert!(mesh_to_gaussians(&TriangleMesh::default()).is_empty());
}

#[test]
fn ring_has_three_rings_aimed_at_center() {
    let center = Vector3::new(0.3, -1.0, 2.0);
    let cams = ring_cameras(center, 1.0, 8, 5.0, 64);
    assert_eq!(cams.len(), 24);
    for c in &cams {
        let to_center = center - c.center();
        let off_axis = to_center - c.forward() * c.forward().dot(&to_center);
        assert!(off_axis.norm() < 1e-6);
        assert!((to_center.norm() - 5.0).abs() < 1e-9);
    }
}

#[test]
fn ring_depth_of_sphere_shell() {
    let r = 1.0;
    let d = 5.0;
    let voxel = 2.0 * r / 64.0;
    let field = mesh_to_gaussians(&icosphere(4, r));
    let views = render_depth_ring(&field, 8, d, 128).unwrap();
    assert_eq!(views.len(), 24);
    for v in &views {
        let w = v.camera.width;
        let center = v.depth[(w / 2) * w + w / 2] as f64;
        assert!((center - (d - r)).abs() <= 2.0 * voxel, "center depth {center}");
        // corners look past the object
        assert_eq!(v.depth[0], 0.0);
    }
}

#[test]
fn tsdf_fusion_is_order_independent() {
    let cam = |x: f64| CameraModel {
        fx: 40.0,
        fy: 40.0,
        cx: 16.0,
        cy: 16.0,
        width: 32,
        height: 32,
        pose: RigidTransform::from_translation(Vector3::new(x, 0.0, 0.0)),
        near: 0.1,
        far: 10.0,
    };
    let a: Vec<f32> = (0..1024).map(|i| 2.0 + 0.001 * (i % 32) as f32).collect();
    let b: Vec<f32> = (0..1024).map(|i| 1.9 + 0.002 * (i / 32) as f32).collect();
    let fresh = || TsdfVolume::new(Vector3::new(-0.2, -0.2, 1.5), 0.02, [21, 21, 51], 0.06).unwrap();
    let mut ab = fresh();
    tsdf_fuse(&mut ab, &cam(0.0), &a).unwrap();
    tsdf_fuse(&mut ab, &cam(0.05), &b).unwrap();
    let mut ba = fresh();
    tsdf_fuse(&mut ba, &cam(0.05), &b).unwrap();
    tsdf_fuse(&mut ba, &cam(0.0), &a).unwrap();
    assert_eq!(ab, ba);
}

#[test]
fn analytic_sphere_extracts_closed_mesh_at_radius() {
    let vol = sphere_volume(0.5, 64);
    let mesh = extract_mesh(&vol);
    assert!(!mesh.is_empty());
    assert!(mesh.is_closed());
    for v in &mesh.vertices {
        assert!((v.norm() - 0.5).abs() <= vol.voxel_size);
    }
    assert!(mesh.signed_volume() > 0.0);
}

#[test]
fn decimation_noop_and_budget() {
    let mesh = extract_mesh(&sphere_volume(0.5, 64));
    let same = decimate(&mesh, mesh.faces.len()).unwrap();
    assert_eq!(same.faces.len(), mesh.faces.len());
    assert_eq!(same.vertices, mesh.vertices);
    assert!(decimate(&mesh, 3).is_err());
}

#[test]
fn decimated_sphere_stays_within_five_voxels() {
    let vol = sphere_volume(0.5, 64);
    let mesh = extract_mesh(&vol);
    let small = decimate(&mesh, 500).unwrap();
    assert!(small.faces.len() <= 500);
    assert!(small.is_closed());
    let h = hausdorff_distance(&mesh, &small, vol.voxel_size * 0.5);
    assert!(h <= 5.0 * vol.voxel_size, "hausdorff {h} vs voxel {}", vol.voxel_size);
}

#[test]
fn tiny_primitive_does_not_crash() {
    let field = GaussianField::from_primitives(
        0,
        vec![GaussianPrimitive::isotropic(Vector3::new(0.0, 0.0, 1.0), 1e-4, 0.9, [0.5; 3])],
    );
    let params = FusionParams { voxel_size: Some(0.01), resolution: 64, ..Default::default() };
    match gaussians_to_mesh(&field, &params) {
        Err(e) => assert!(!e.to_string().is_empty()),
        Ok(m) => {
            let (lo, hi) = m.bounds().unwrap();
            assert!((hi - lo).max() <= 8.0 * 0.01);
        }
    }
}

#[test]
fn gs_to_mesh_respects_face_budget() {
    let field = mesh_to_gaussians(&icosphere(2, 1.0));
    let params = FusionParams { resolution: 96, target_faces: Some(100), ..Default::default() };
    let mesh = gaussians_to_mesh(&field, &params).unwrap();
    assert!(mesh.faces.len() <= 100);
    assert!(mesh.faces.len() >= 4);
}

#[test]
fn downsampled_sphere_keeps_its_radius() {
    let vol = sphere_volume(0.5, 64).downsampled().unwrap();
    assert_eq!(vol.dims, [32; 3]);
    let mesh = extract_mesh(&vol);
    assert!(mesh.is_closed());
    for v in &mesh.vertices {
        assert!((v.norm() - 0.5).abs() <= vol.voxel_size);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marching_cubes_edges_are_manifold(values in prop::collection::vec(-1.0f64..1.0, 6 * 6 * 6)) {
        let mut vol = TsdfVolume::new(Vector3::zeros(), 0.1, [6; 3], 0.3).unwrap();
        vol.tsdf.copy_from_slice(&values);
        vol.weights.fill(1.0);
        let mesh = extract_mesh(&vol);
        for (edge, count) in mesh.edge_face_counts() {
            prop_assert!(count <= 2, "edge {:?} has {} faces", edge, count);
        }
    }

    #[test]
    fn face_primitive_sits_on_its_face(
        a in prop::array::uniform3(-5.0f64..5.0),
        b in prop::array::uniform3(-5.0f64..5.0),
        c in prop::array::uniform3(-5.0f64..5.0),
    ) {
        let [a, b, c] = [a, b, c].map(Vector3::from);
        let n = (b - a).cross(&(c - a));
        prop_assume!(n.norm() > 1e-3);
        let mesh = TriangleMesh::new(vec![a, b, c], vec![[0, 1, 2]]);
        let p = &mesh_to_gaussians(&mesh).primitives[0];
        prop_assert!((p.mean - (a + b + c) / 3.0).norm() < 1e-12);
        let axis = normal_axis(p);
        let angle = axis.cross(&n.normalize()).norm().asin();
        prop_assert!(angle < 1e-6);
        prop_assert!(axis.dot(&n) > 0.0);
        prop_assert!(p.scale.z < p.scale.x && p.scale.x == p.scale.y);
    }
}

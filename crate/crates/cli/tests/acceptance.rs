//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a criterion fails that is not listed in `KNOWN_FAILURES`.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::Parser;
use nalgebra::Vector3;
use splatsim::augment::{apply_gamma, apply_hsv_shift, AugmentationConfig, Augmenter, HsvJitter};
use splatsim::image::{quantize8, RgbImage};
use splatsim::io::{encode_cloud_pcd, encode_cloud_ply, encode_pfm, load_splat_ply, save_splat_ply, write_rgb_image, CloudEncoding};
use splatsim::raster::{
    project, render_view, BruteForceRasterizer, CameraModel, RasterOptions, Rasterizer, TiledRasterizer,
};
use splatsim::synth::{cube_mesh, icosphere, random_field, wall_field, RandomFieldSpec};
use splatsim::trace::{BvhTracer, LinearTracer, Ray, RayTracer, WorldGaussians};
use splatsim::transfer::metrics::hausdorff_distance;
use splatsim::transfer::{gaussians_to_mesh, mesh_to_gaussians, FusionParams};
use splatsim::types::{NodePoses, RigidTransform, TriangleMesh};
use splatsim_cli::args::{AugmentArgs, Cli, Command, LidarArgs, RenderArgs};
use splatsim_cli::{bench, commands, with_threads};

/// Criteria that fail on this implementation; see the README.
const KNOWN_FAILURES: &[u32] = &[4];

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn main() {
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let checks: [(u32, fn() -> (bool, String)); 9] = [
        (1, rasterizer_oracle),
        (2, tracer_oracle),
        (3, mesh_to_gs),
        (4, gs_to_mesh),
        (5, raster_vs_trace_depth),
        (6, bench_speedup),
        (7, determinism),
        (8, io_round_trips),
        (9, augmentation),
    ];
    let mut outcomes = Vec::new();
    for (id, check) in checks {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check();
        let o = Outcome { id, pass, detail };
        println!(
            "{} criterion {}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        outcomes.push(o);
    }
    let unexpected: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.pass && !KNOWN_FAILURES.contains(&o.id))
        .map(|o| o.id)
        .collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass; known failures: {:?}", outcomes.len(), KNOWN_FAILURES);
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}

fn front_camera(w: usize, h: usize) -> CameraModel {
    CameraModel::with_fov(w, h, 60f64.to_radians(), RigidTransform::identity())
}

fn rasterizer_oracle() -> (bool, String) {
    let cam = front_camera(128, 128);
    let (mut rgb, mut depth) = (0f32, 0f32);
    for seed in 0..200u64 {
        let spec = RandomFieldSpec {
            count: 1 + (seed as usize * 7919) % 2000,
            sh_degree: (seed % 4) as u8,
            ..Default::default()
        };
        let field = random_field(&spec, 1000 + seed);
        let splats = project(&field, &NodePoses::new(), &cam);
        let a = TiledRasterizer.rasterize(&splats, &cam, &RasterOptions::default());
        let b = BruteForceRasterizer.rasterize(&splats, &cam, &RasterOptions::default());
        for i in 0..a.rgb.len() {
            for c in 0..3 {
                rgb = rgb.max((a.rgb[i][c] - b.rgb[i][c]).abs());
            }
            depth = depth.max((a.depth[i] - b.depth[i]).abs());
        }
    }
    (rgb <= 1e-4 && depth <= 1e-3, format!("200 scenes, max |Δrgb| {rgb:.2e}, max |Δdepth| {depth:.2e} m"))
}

fn tracer_oracle() -> (bool, String) {
    use rand::{Rng, SeedableRng};
    let field = random_field(&RandomFieldSpec { count: 5000, ..Default::default() }, 77);
    let world = Arc::new(WorldGaussians::from_field(&field, &NodePoses::new()));
    let bvh = BvhTracer::new(world.clone());
    let lin = LinearTracer::new(world);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    let mut hits = 0;
    for _ in 0..10_000 {
        let o = Vector3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-2.0..0.0));
        let t = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(2.0..6.0));
        let ray = Ray::new(o, t - o, 20.0);
        let a = bvh.trace(&ray, 0.5);
        let b = lin.trace(&ray, 0.5);
        hits += a.depth.is_some() as usize;
        let same = a.depth.map(f64::to_bits) == b.depth.map(f64::to_bits)
            && a.accumulated_alpha.to_bits() == b.accumulated_alpha.to_bits();
        mismatches += !same as usize;
    }
    (mismatches == 0, format!("10000 rays x 5000 primitives, {hits} hits, {mismatches} mismatches"))
}

/// Twelve cameras on a Fibonacci lattice looking at the origin.
fn twelve_views(distance: f64, side: usize) -> Vec<CameraModel> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..12)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / 12.0;
            let r = (1.0 - z * z).sqrt();
            let a = golden * k as f64;
            let eye = Vector3::new(r * a.cos(), r * a.sin(), z) * distance;
            let up = if z.abs() > 0.9 { Vector3::x() } else { Vector3::z() };
            CameraModel::with_fov(side, side, 40f64.to_radians(), CameraModel::look_at_pose(eye, Vector3::zeros(), up))
        })
        .collect()
}

/// Z-buffer coverage of a mesh: projected triangles filled with edge functions
/// at pixel centers.
fn mesh_zbuffer(mesh: &TriangleMesh, cam: &CameraModel) -> Vec<f64> {
    let mut z = vec![f64::INFINITY; cam.width * cam.height];
    let proj: Vec<[f64; 3]> = mesh
        .vertices
        .iter()
        .map(|v| {
            let p = cam.pose.transform_point(v);
            [cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy, p.z]
        })
        .collect();
    for f in &mesh.faces {
        let [a, b, c] = f.map(|i| proj[i as usize]);
        let area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        if area.abs() < 1e-12 {
            continue;
        }
        let x0 = a[0].min(b[0]).min(c[0]).floor().max(0.0) as usize;
        let x1 = (a[0].max(b[0]).max(c[0]).ceil() as usize).min(cam.width);
        let y0 = a[1].min(b[1]).min(c[1]).floor().max(0.0) as usize;
        let y1 = (a[1].max(b[1]).max(c[1]).ceil() as usize).min(cam.height);
        for y in y0..y1 {
            for x in x0..x1 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                let edge = |p: [f64; 3], q: [f64; 3]| ((q[0] - p[0]) * (py - p[1]) - (q[1] - p[1]) * (px - p[0])) / area;
                let (wa, wb, wc) = (edge(b, c), edge(c, a), edge(a, b));
                if wa >= 0.0 && wb >= 0.0 && wc >= 0.0 {
                    let d = wa * a[2] + wb * b[2] + wc * c[2];
                    let k = y * cam.width + x;
                    z[k] = z[k].min(d);
                }
            }
        }
    }
    z
}

fn mesh_to_gs() -> (bool, String) {
    let mesh = icosphere(3, 1.0);
    let field = mesh_to_gaussians(&mesh);
    let mut exact = field.len() == mesh.faces.len();
    let mut worst_angle = 0f64;
    for (f, p) in field.primitives.iter().enumerate() {
        let [a, b, c] = mesh.triangle(f);
        exact &= p.mean == (a + b + c) / 3.0;
        let k = (0..3).min_by(|&i, &j| p.scale[i].total_cmp(&p.scale[j])).unwrap();
        let axis = p.rotation_matrix().column(k).into_owned();
        let n = (b - a).cross(&(c - a)).normalize();
        worst_angle = worst_angle.max(axis.cross(&n).norm().min(1.0).asin());
    }
    let (mut inter, mut union) = (0usize, 0usize);
    let mut worst_iou = 1f64;
    // at 128 px the 0.3 px² low-pass alone costs about two points of IoU
    for cam in twelve_views(4.0, 512) {
        let t = render_view(&field, &NodePoses::new(), &cam, &TiledRasterizer, &RasterOptions::default());
        let z = mesh_zbuffer(&mesh, &cam);
        let (mut i, mut u) = (0, 0);
        for k in 0..z.len() {
            let gs = t.accum_alpha[k] > 0.5;
            let m = z[k].is_finite();
            i += (gs && m) as usize;
            u += (gs || m) as usize;
        }
        worst_iou = worst_iou.min(i as f64 / u as f64);
        inter += i;
        union += u;
    }
    let iou = inter as f64 / union as f64;
    let pass = worst_iou >= 0.95 && exact && worst_angle <= 1e-6;
    (
        pass,
        format!(
            "1280 faces, silhouette IoU {iou:.4} (worst view {worst_iou:.4}), means exact: {exact}, \
             max normal angle {worst_angle:.1e} rad"
        ),
    )
}

fn gs_to_mesh() -> (bool, String) {
    let sphere = icosphere(3, 1.0);
    let voxel = 2.0 / 64.0;
    let params = FusionParams { voxel_size: Some(voxel), ..Default::default() };
    let (h, sphere_ok) = match gaussians_to_mesh(&mesh_to_gaussians(&sphere), &params) {
        Ok(back) => {
            let h = hausdorff_distance(&sphere, &back, voxel * 0.25) / voxel;
            (h, h <= 3.0)
        }
        Err(e) => return (false, format!("icosphere round trip failed: {e}")),
    };
    let cube = cube_mesh(0.5);
    let cube_voxel = 3f64.sqrt() / 64.0;
    let params = FusionParams { voxel_size: Some(cube_voxel), ..Default::default() };
    let (ratio, cube_ok) = match gaussians_to_mesh(&mesh_to_gaussians(&cube), &params) {
        Ok(back) => {
            let r = back.signed_volume() / cube.signed_volume();
            (r, (r - 1.0).abs() <= 0.10)
        }
        Err(e) => return (false, format!("cube round trip failed: {e}")),
    };
    (
        sphere_ok && cube_ok,
        format!("icosphere Hausdorff {h:.2} voxels (<= 3), cube volume ratio {ratio:.3} (within 10%: {cube_ok})"),
    )
}

fn raster_vs_trace_depth() -> (bool, String) {
    let field = wall_field(5.0, 4.0, 0.05);
    let cam = front_camera(160, 120);
    let t = render_view(&field, &NodePoses::new(), &cam, &TiledRasterizer, &RasterOptions { normalize_depth: true });
    let tracer = BvhTracer::new(Arc::new(WorldGaussians::from_field(&field, &NodePoses::new())));
    let (mut valid, mut close, mut worst) = (0usize, 0usize, 0f64);
    for j in 0..cam.height {
        for i in 0..cam.width {
            let k = j * cam.width + i;
            let (o, d) = cam.pixel_ray(i, j);
            let hit = tracer.trace(&Ray::new(o, d, 50.0), 0.5);
            let (Some(range), true) = (hit.depth, t.accum_alpha[k] > 0.5) else { continue };
            // ranges along the ray → view-space z
            let traced = range * d.dot(&cam.forward());
            let err = (traced - t.depth[k] as f64).abs();
            valid += 1;
            close += (err <= 0.02) as usize;
            worst = worst.max(err);
        }
    }
    let share = close as f64 / valid.max(1) as f64;
    (
        valid > 0 && share >= 0.99,
        format!("{valid} valid pixels, {:.2}% within 2 cm, max error {:.4} m", 100.0 * share, worst),
    )
}

fn bench_speedup() -> (bool, String) {
    let cli = Cli::parse_from(["splatsim", "bench"]);
    let Command::Bench(args) = cli.command else { unreachable!() };
    let report = match bench::run(&args, 0) {
        Ok(r) => r,
        Err(e) => return (false, format!("bench failed: {e}")),
    };
    let table = report.table();
    let header_ok = table.lines().any(|l| l.starts_with("| machine") && l.contains("FPS"));
    let rows = table.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| machine")).count();
    let factor = report.speedup.as_ref().map(|s| s.factor).unwrap_or(0.0);
    let fps: Vec<String> = report.rows.iter().map(|r| format!("{:.2}", r.fps)).collect();
    (
        factor >= 20.0 && header_ok && rows == 2,
        format!(
            "{} primitives, {} cameras {}x{}: tiled {factor:.1}x brute force, {rows} machine rows, FPS {}",
            report.primitives, report.cameras, report.width, report.height, fps.join(" / ")
        ),
    )
}

fn scene_dir() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let spec = RandomFieldSpec { count: 3000, center: Vector3::zeros(), half_extent: Vector3::repeat(2.0), ..Default::default() };
    save_splat_ply(&random_field(&spec, 3), &dir.path().join("bg.ply")).unwrap();
    let manifest = r#"{
        "nodes": [{"id": "room", "kind": "background", "splat": "bg.ply"}],
        "sensors": [
            {"type": "camera", "id": "cam", "mount": {"p": [0, 0, -6]},
             "fx": 200, "fy": 200, "cx": 160, "cy": 120, "width": 320, "height": 240},
            {"type": "lidar", "id": "top", "channel_count": 16, "min_elevation_deg": -15,
             "max_elevation_deg": 15, "azimuth_step_deg": 0.5, "max_range": 30}
        ]
    }"#;
    let path = dir.path().join("scene.json");
    std::fs::write(&path, manifest).unwrap();
    (dir, path)
}

fn determinism() -> (bool, String) {
    let (dir, scene) = scene_dir();
    let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let render = RenderArgs {
        scene: scene.clone(),
        camera: "cam".into(),
        poses: None,
        t: 0.0,
        out: dir.path().join("r"),
        backend: "tiled".into(),
        normalize_depth: false,
    };
    let lidar = LidarArgs {
        scene,
        lidar: "top".into(),
        poses: None,
        t: 0.0,
        out: dir.path().join("scan.ply"),
        binary: true,
        tracer: "bvh".into(),
    };
    let cli = Cli::parse_from(["splatsim", "bench", "--primitives", "20000", "--width", "160", "--height", "120",
                               "--warmup", "0", "--frames", "1", "--crop", "0", "--rows", "1"]);
    let Command::Bench(bench_args) = cli.command else { unreachable!() };
    let mut runs = Vec::new();
    for _ in 0..2 {
        for threads in [1, 4, n] {
            let hashes = with_threads(threads, || {
                let r = commands::render(&render).map(|o| o.hash);
                let l = commands::lidar(&lidar).map(|o| o.hash);
                let b = bench::run(&bench_args, 0).map(|o| o.image_hashes);
                (r.ok(), l.ok(), b.ok())
            })
            .unwrap();
            runs.push(hashes);
        }
    }
    let complete = runs.iter().all(|(r, l, b)| r.is_some() && l.is_some() && b.is_some());
    let same = runs.iter().all(|h| *h == runs[0]);
    (
        complete && same,
        format!("render, lidar and bench hashes over threads 1/4/{n} and 2 runs: {} distinct", {
            let mut d = runs.clone();
            d.dedup();
            d.len()
        }),
    )
}

fn header_end(bytes: &[u8], marker: &[u8]) -> usize {
    bytes.windows(marker.len()).position(|w| w == marker).unwrap() + marker.len()
}

/// Minimal binary little-endian PLY reader: vertex properties as f64 rows.
fn read_ply(bytes: &[u8]) -> (Vec<String>, Vec<Vec<f64>>) {
    let end = header_end(bytes, b"end_header\n");
    let header = std::str::from_utf8(&bytes[..end]).unwrap();
    let mut count = 0;
    let mut props = Vec::new();
    for line in header.lines() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.as_slice() {
            ["format", f, _] => assert_eq!(*f, "binary_little_endian"),
            ["element", "vertex", n] => count = n.parse().unwrap(),
            ["property", ty, name] => props.push((ty.to_string(), name.to_string())),
            _ => {}
        }
    }
    let mut at = end;
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let row = props
            .iter()
            .map(|(ty, _)| {
                let (v, n) = match ty.as_str() {
                    "float" => (f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as f64, 4),
                    "ushort" => (u16::from_le_bytes(bytes[at..at + 2].try_into().unwrap()) as f64, 2),
                    other => panic!("unexpected type {other}"),
                };
                at += n;
                v
            })
            .collect();
        rows.push(row);
    }
    assert_eq!(at, bytes.len());
    (props.into_iter().map(|p| p.1).collect(), rows)
}

/// Minimal ASCII PCD reader.
fn read_pcd(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut fields = Vec::new();
    let mut points = 0;
    let mut lines = text.lines();
    for line in lines.by_ref() {
        let w: Vec<&str> = line.split_whitespace().collect();
        match w.first().copied() {
            Some("FIELDS") => fields = w[1..].iter().map(|s| s.to_string()).collect(),
            Some("POINTS") => points = w[1].parse().unwrap(),
            Some("DATA") => {
                assert_eq!(w[1], "ascii");
                break;
            }
            _ => {}
        }
    }
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), points);
    (fields, rows)
}

fn read_pfm(bytes: &[u8]) -> (usize, usize, Vec<f32>) {
    let mut newlines = 0;
    let mut end = 0;
    while newlines < 3 {
        newlines += (bytes[end] == b'\n') as usize;
        end += 1;
    }
    let header = std::str::from_utf8(&bytes[..end]).unwrap();
    let w: Vec<&str> = header.split_whitespace().collect();
    assert_eq!(w[0], "Pf");
    let scale: f64 = w[3].parse().unwrap();
    assert!(scale < 0.0, "little endian");
    let (width, height) = (w[1].parse().unwrap(), w[2].parse().unwrap());
    let data = bytes[end..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    (width, height, data)
}

fn io_round_trips() -> (bool, String) {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    let mut ok = true;

    // splat PLY: save → load → save is byte-exact, and an independent reader sees the means
    for degree in 0..=3u8 {
        let field = random_field(&RandomFieldSpec { count: 500, sh_degree: degree, ..Default::default() }, 40 + degree as u64);
        let (a, b) = (dir.path().join("a.ply"), dir.path().join("b.ply"));
        save_splat_ply(&field, &a).unwrap();
        save_splat_ply(&load_splat_ply(&a).unwrap(), &b).unwrap();
        let bytes = std::fs::read(&a).unwrap();
        ok &= bytes == std::fs::read(&b).unwrap();
        let (names, rows) = read_ply(&bytes);
        let x = names.iter().position(|n| n == "x").unwrap();
        ok &= rows.len() == field.len()
            && rows.iter().zip(&field.primitives).all(|(r, p)| r[x] == p.mean.x as f32 as f64);
    }
    notes.push(format!("splat PLY double round trip byte-exact: {ok}"));

    // PFM
    let data: Vec<f32> = (0..12).map(|i| i as f32 * 0.5).collect();
    let (w, h, back) = read_pfm(&encode_pfm(4, 3, &data));
    let pfm_ok = (w, h) == (4, 3) && (0..3).all(|y| back[(2 - y) * 4..(3 - y) * 4] == data[y * 4..(y + 1) * 4]);
    ok &= pfm_ok;
    notes.push(format!("PFM: {pfm_ok}"));

    // point clouds from a real scan
    let (_d, scene) = scene_dir();
    let lidar = LidarArgs {
        scene,
        lidar: "top".into(),
        poses: None,
        t: 0.0,
        out: dir.path().join("scan.ply"),
        binary: true,
        tracer: "bvh".into(),
    };
    let report = commands::lidar(&lidar).unwrap();
    let scene = splatsim::scene::load_scene(&lidar.scene).unwrap();
    let tracer = scene.build_tracer(&splatsim::trace::TracerRegistry::default(), "bvh").unwrap();
    let cloud = scene.scan("top", tracer.as_ref()).unwrap();
    let (names, rows) = read_ply(&std::fs::read(&lidar.out).unwrap());
    let ply_ok = names == ["x", "y", "z", "ring", "azimuth"]
        && rows.len() == report.points
        && rows.iter().zip(&cloud.points).all(|(r, p)| {
            r[0] == p.position[0] as f32 as f64 && r[3] == p.ring as f64
        });
    let (fields, pts) = read_pcd(std::str::from_utf8(&encode_cloud_pcd(&cloud, CloudEncoding::Ascii)).unwrap());
    let pcd_ok = fields == ["x", "y", "z", "ring", "azimuth"]
        && pts.len() == cloud.len()
        && pts.iter().zip(&cloud.points).all(|(r, p)| (r[2] as f32) == p.position[2] as f32);
    let same_ply = encode_cloud_ply(&cloud, CloudEncoding::Binary) == std::fs::read(&lidar.out).unwrap();
    ok &= ply_ok && pcd_ok && same_ply && !cloud.is_empty();
    notes.push(format!("cloud PLY ({} points): {ply_ok}, PCD: {pcd_ok}", cloud.len()));
    (ok, notes.join(", "))
}

fn augmentation() -> (bool, String) {
    // gamma round trip over every 8-bit level
    let levels = RgbImage::from_fn(256, 1, |x, _| [x as f64 / 255.0; 3]);
    let mut lsb = 0i32;
    for g in [0.5, 0.7, 1.5, 2.2] {
        let back = apply_gamma(&apply_gamma(&levels, g), 1.0 / g);
        for (x, p) in back.data.iter().enumerate() {
            lsb = lsb.max((quantize8(p[0]) as i32 - x as i32).abs());
        }
    }
    let red = RgbImage::filled(1, 1, [1.0, 0.0, 0.0]);
    let g = apply_hsv_shift(&red, 120.0, 0.0, 0.0).data[0];
    let hue_err = (g[0] - 0.0).abs().max((g[1] - 1.0).abs()).max(g[2].abs());

    // replay through the command and its on-disk manifest
    let dir = tempfile::tempdir().unwrap();
    let frames = dir.path().join("in");
    std::fs::create_dir(&frames).unwrap();
    for k in 0..6 {
        let img = RgbImage::from_fn(32, 24, |x, y| [x as f64 / 32.0, y as f64 / 24.0, k as f64 / 6.0]);
        write_rgb_image(&frames.join(format!("{k}.png")), &img).unwrap();
    }
    let config = AugmentationConfig {
        hsv_jitter: Some(HsvJitter { hue_deg: 60.0, saturation: 0.3, value: 0.2 }),
        gamma_range: Some([0.5, 2.0]),
        seed: 11,
        ..Default::default()
    };
    let cfg_path = dir.path().join("aug.json");
    std::fs::write(&cfg_path, serde_json::to_string(&config).unwrap()).unwrap();
    let run = |out: &Path, replay: Option<PathBuf>| {
        commands::augment(
            &AugmentArgs { input: frames.clone(), config: cfg_path.clone(), out: out.to_path_buf(), replay },
            None,
        )
        .unwrap()
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let first = run(&a, None);
    let second = run(&b, Some(a.join(commands::AUGMENT_MANIFEST)));
    let mut files_same = first == second;
    for f in &first.frames {
        files_same &= std::fs::read(a.join(&f.file)).unwrap() == std::fs::read(b.join(&f.file)).unwrap();
    }
    // in memory, bit for bit through JSON
    let aug = Augmenter::new(config).unwrap();
    let mut bits_same = true;
    for f in 0..20 {
        let (out, params) = aug.augment(&levels, f).unwrap();
        let params = serde_json::from_str(&serde_json::to_string(&params).unwrap()).unwrap();
        let again = aug.replay(&levels, &params).unwrap();
        bits_same &= out.data.iter().zip(&again.data).all(|(x, y)| x.map(f64::to_bits) == y.map(f64::to_bits));
    }
    let pass = lsb <= 1 && hue_err <= 1e-6 && files_same && bits_same;
    (
        pass,
        format!(
            "gamma round trip max {lsb} LSB, red +120° error {hue_err:.1e}, replay files identical: {files_same}, \
             replay bit-exact: {bits_same}"
        ),
    )
}

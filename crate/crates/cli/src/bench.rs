//! Throughput harness: a timed multi-camera render loop with a rotating
//! interactive node, plus a brute-force reference on a crop for the speedup.

use std::time::Instant;

use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};
use splatsim::raster::{
    project, render_views, BruteForceRasterizer, CameraModel, PixelWindow, RasterOptions, Rasterizer,
    TiledRasterizer,
};
use splatsim::scene::{load_scene, NodeAsset, Scene};
use splatsim::synth::{orbit_cameras, random_field, RandomFieldSpec};
use splatsim::transfer::field_bounds;
use splatsim::types::{NodeKind, NodePoses, RigidTransform};

use crate::args::BenchArgs;
use crate::{sha256_hex, with_threads, CliError, CliResult};

/// Rotation of the interactive node per frame, radians about +z.
pub const SPIN_PER_FRAME: f64 = 0.05;
/// Share of generated primitives assigned to the rotating node.
pub const INTERACTIVE_SHARE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub machine: String,
    pub threads: usize,
    pub frames: usize,
    pub wall_seconds: f64,
    /// Camera images per second: frames × cameras / wall time.
    pub fps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speedup {
    pub crop: usize,
    pub tiled_seconds_full_frame: f64,
    pub brute_seconds_crop: f64,
    /// Brute-force time per pixel (crop) over tiled time per pixel (full frame).
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub primitives: usize,
    pub width: usize,
    pub height: usize,
    pub cameras: usize,
    pub warmup_frames: usize,
    pub rows: Vec<BenchRow>,
    pub speedup: Option<Speedup>,
    /// SHA-256 of frame 0's canonical bytes, per camera.
    pub image_hashes: Vec<String>,
}

impl BenchReport {
    /// Markdown table with one row per configuration.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{} primitives, {} cameras at {}x{}\n\n| machine | threads | frames | wall (s) | FPS |\n|---|---|---|---|---|\n",
            self.primitives, self.cameras, self.width, self.height
        );
        for r in &self.rows {
            s.push_str(&format!(
                "| {} | {} | {} | {:.3} | {:.1} |\n",
                r.machine, r.threads, r.frames, r.wall_seconds, r.fps
            ));
        }
        if let Some(sp) = &self.speedup {
            s.push_str(&format!(
                "\ntiled vs brute force ({}x{} crop): {:.1}x\n",
                sp.crop, sp.crop, sp.factor
            ));
        }
        s
    }
}

pub fn machine_descriptor(threads: usize) -> String {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    format!(
        "{}-{}, {} logical cores, {} worker threads",
        std::env::consts::OS,
        std::env::consts::ARCH,
        cores,
        threads
    )
}

/// Generated workload: a static background cloud and a rotating object.
pub fn generated_scene(primitives: usize, seed: u64) -> CliResult<Scene> {
    let n_obj = ((primitives as f64) * INTERACTIVE_SHARE).round() as usize;
    let background = random_field(
        &RandomFieldSpec {
            count: primitives - n_obj,
            center: Vector3::zeros(),
            half_extent: Vector3::new(3.0, 3.0, 1.5),
            scale_range: (0.005, 0.04),
            opacity_range: (0.1, 0.9),
            sh_degree: 1,
        },
        seed,
    );
    let object = random_field(
        &RandomFieldSpec {
            count: n_obj,
            center: Vector3::zeros(),
            half_extent: Vector3::new(0.8, 0.8, 0.8),
            scale_range: (0.005, 0.03),
            opacity_range: (0.3, 0.95),
            sh_degree: 1,
        },
        seed.wrapping_add(1),
    );
    let assets = vec![
        NodeAsset {
            id: "background".into(),
            kind: NodeKind::Background,
            field: background,
            mesh: None,
            pose: RigidTransform::identity(),
        },
        NodeAsset {
            id: "object".into(),
            kind: NodeKind::Interactive,
            field: object,
            mesh: None,
            pose: RigidTransform::identity(),
        },
    ];
    Ok(Scene::assemble(assets, Vec::new(), Vec::new())?)
}

fn bench_cameras(scene: &Scene, args: &BenchArgs) -> CliResult<Vec<CameraModel>> {
    let (lo, hi) = field_bounds(&scene.field)?;
    let center = (lo + hi) * 0.5;
    let radius = 0.6 * (hi - lo).norm();
    let cams = orbit_cameras(args.cameras, args.width, args.height, 60f64.to_radians(), center, radius,
                             0.25 * radius);
    for c in &cams {
        c.validate()?;
    }
    Ok(cams)
}

/// Node poses for frame `k`: every interactive node spun about +z.
pub fn frame_poses(scene: &Scene, k: usize) -> NodePoses {
    let mut poses = scene.node_poses();
    let spin = RigidTransform::from_rotation(UnitQuaternion::from_axis_angle(
        &Vector3::z_axis(),
        SPIN_PER_FRAME * k as f64,
    ));
    for n in &scene.nodes {
        if n.kind == NodeKind::Interactive {
            poses.insert(n.id.clone(), n.pose.compose(&spin));
        }
    }
    poses
}

fn timed_row(scene: &Scene, cams: &[CameraModel], args: &BenchArgs, threads: usize) -> CliResult<BenchRow> {
    let opts = RasterOptions::default();
    with_threads(threads, || {
        for k in 0..args.warmup {
            render_views(&scene.field, &frame_poses(scene, k), cams, &TiledRasterizer, &opts);
        }
        let start = Instant::now();
        let mut frames = 0;
        while frames < args.frames.max(1) || start.elapsed().as_secs_f64() < args.seconds {
            let poses = frame_poses(scene, args.warmup + frames);
            render_views(&scene.field, &poses, cams, &TiledRasterizer, &opts);
            frames += 1;
        }
        let wall = start.elapsed().as_secs_f64();
        let used = rayon::current_num_threads();
        BenchRow {
            machine: machine_descriptor(used),
            threads: used,
            frames,
            wall_seconds: wall,
            fps: (frames * cams.len()) as f64 / wall,
        }
    })
}

/// Times one full tiled frame against a brute-force crop of camera 0.
pub fn measure_speedup(scene: &Scene, cam: &CameraModel, crop: usize) -> Speedup {
    let poses = frame_poses(scene, 0);
    let splats = project(&scene.field, &poses, cam);
    let opts = RasterOptions::default();
    let mut tiled = f64::INFINITY;
    for _ in 0..3 {
        let t = Instant::now();
        std::hint::black_box(TiledRasterizer.rasterize(&splats, cam, &opts));
        tiled = tiled.min(t.elapsed().as_secs_f64());
    }
    let (cw, ch) = (crop.min(cam.width), crop.min(cam.height));
    let window = PixelWindow {
        x0: (cam.width - cw) / 2,
        y0: (cam.height - ch) / 2,
        width: cw,
        height: ch,
    };
    let t = Instant::now();
    std::hint::black_box(BruteForceRasterizer.rasterize_window(&splats, window, &opts));
    let brute = t.elapsed().as_secs_f64();
    let full_px = (cam.width * cam.height) as f64;
    let crop_px = (cw * ch) as f64;
    Speedup {
        crop,
        tiled_seconds_full_frame: tiled,
        brute_seconds_crop: brute,
        factor: (brute / crop_px) / (tiled / full_px),
    }
}

/// Canonical-byte hashes of frame 0 for every camera.
pub fn frame_hashes(scene: &Scene, cams: &[CameraModel]) -> Vec<String> {
    render_views(&scene.field, &frame_poses(scene, 0), cams, &TiledRasterizer, &RasterOptions::default())
        .iter()
        .map(|t| sha256_hex(&t.canonical_bytes()))
        .collect()
}

pub fn run(args: &BenchArgs, seed: u64) -> CliResult<BenchReport> {
    if args.cameras == 0 {
        return Err(CliError::validation("bench needs at least one camera"));
    }
    let scene = match &args.scene {
        Some(p) => load_scene(p)?,
        None => generated_scene(args.primitives, seed)?,
    };
    let cams = bench_cameras(&scene, args)?;
    let image_hashes = frame_hashes(&scene, &cams);
    let mut rows = Vec::with_capacity(args.rows.len());
    for &threads in &args.rows {
        let row = timed_row(&scene, &cams, args, threads)?;
        log::info!("{} threads: {:.1} FPS", row.threads, row.fps);
        rows.push(row);
    }
    let speedup = (args.crop > 0).then(|| measure_speedup(&scene, &cams[0], args.crop));
    Ok(BenchReport {
        primitives: scene.field.len(),
        width: args.width,
        height: args.height,
        cameras: cams.len(),
        warmup_frames: args.warmup,
        rows,
        speedup,
        image_hashes,
    })
}

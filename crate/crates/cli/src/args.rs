use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "splatsim", version, about = "Gaussian-splat sensor simulation")]
pub struct Cli {
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "SPLATSIM_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Seed for generated scenes; overrides the seed in augmentation configs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: log::LevelFilter,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render RGB, depth and alpha images for one camera.
    Render(RenderArgs),
    /// Scan a point cloud with one LiDAR.
    Lidar(LidarArgs),
    /// Convert between meshes and Gaussian fields.
    Convert(ConvertArgs),
    /// Measure rendering throughput.
    Bench(BenchArgs),
    /// Randomize a directory of PNG frames.
    Augment(AugmentArgs),
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene manifest (JSON).
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub camera: String,
    /// Pose stream (JSON lines) driving interactive nodes.
    #[arg(long)]
    pub poses: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Output prefix; writes `<prefix>_rgb.png`, `<prefix>_depth.pfm`, `<prefix>_alpha.png`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "tiled")]
    pub backend: String,
    /// Divide depth by accumulated alpha.
    #[arg(long)]
    pub normalize_depth: bool,
}

#[derive(Debug, Args)]
pub struct LidarArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub lidar: String,
    #[arg(long)]
    pub poses: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// `.ply` or `.pcd`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub binary: bool,
    #[arg(long, default_value = "bvh")]
    pub tracer: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Mesh2gs,
    Gs2mesh,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(value_enum)]
    pub direction: Direction,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// gs2mesh: voxel edge in meters (default: bounding diagonal / 128).
    #[arg(long)]
    pub voxel_size: Option<f64>,
    /// gs2mesh: face budget for decimation.
    #[arg(long)]
    pub target_faces: Option<usize>,
    /// gs2mesh: azimuths per elevation ring.
    #[arg(long, default_value_t = 8)]
    pub views: usize,
    /// gs2mesh: depth image side in pixels.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
    /// gs2mesh: also dump the fused volume here.
    #[arg(long)]
    pub dump_volume: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct BenchArgs {
    /// Scene manifest; a generated scene is used when absent.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Primitive count of the generated scene.
    #[arg(long, default_value_t = 100_000)]
    pub primitives: usize,
    #[arg(long, default_value_t = 5)]
    pub cameras: usize,
    #[arg(long, default_value_t = 640)]
    pub width: usize,
    #[arg(long, default_value_t = 480)]
    pub height: usize,
    /// Untimed frames before measurement.
    #[arg(long, default_value_t = 30)]
    pub warmup: usize,
    /// Minimum measured frames.
    #[arg(long, default_value_t = 30)]
    pub frames: usize,
    /// Keep measuring until at least this many seconds have elapsed.
    #[arg(long, default_value_t = 0.0)]
    pub seconds: f64,
    /// Side of the brute-force crop used for the speedup estimate; 0 skips it.
    #[arg(long, default_value_t = 128)]
    pub crop: usize,
    /// Thread counts, one report row each (0 = one per core).
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
    pub rows: Vec<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Directory of PNG frames, processed in lexicographic order.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Augmentation config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Re-apply a parameter manifest written by an earlier run instead of sampling.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

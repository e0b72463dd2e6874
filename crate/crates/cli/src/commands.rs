use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use splatsim::augment::{AugmentationConfig, Augmenter, FrameParams};
use splatsim::io::{
    load_mesh, load_splat_ply, read_rgb_image, save_cloud, save_mesh, save_splat_ply, write_pfm,
    write_png_gray8, write_png_rgb8, write_rgb_image, CloudEncoding,
};
use splatsim::raster::{RasterOptions, RasterizerRegistry};
use splatsim::scene::{load_scene, Scene};
use splatsim::trace::TracerRegistry;
use splatsim::transfer::{gaussians_to_mesh_with_volume, mesh_to_gaussians, metrics::TriangleGrid, FusionParams};
use splatsim::types::PoseStream;

use crate::args::{AugmentArgs, ConvertArgs, Direction, LidarArgs, RenderArgs};
use crate::{sha256_hex, CliError, CliResult};

fn scene_at(manifest: &Path, poses: Option<&Path>, t: f64) -> CliResult<Scene> {
    let mut scene = load_scene(manifest)?;
    if let Some(p) = poses {
        let stream = PoseStream::load(p)?;
        scene.step_to(&stream, t)?;
    } else if t != 0.0 {
        scene.step_to(&PoseStream::default(), t)?;
    }
    Ok(scene)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderOutput {
    pub rgb: PathBuf,
    pub depth: PathBuf,
    pub alpha: PathBuf,
    /// SHA-256 of the target's canonical bytes.
    pub hash: String,
}

pub fn render(args: &RenderArgs) -> CliResult<RenderOutput> {
    let scene = scene_at(&args.scene, args.poses.as_deref(), args.t)?;
    let backend = RasterizerRegistry::default().get(&args.backend)?;
    let opts = RasterOptions {
        normalize_depth: args.normalize_depth,
    };
    let target = scene.render(&args.camera, backend.as_ref(), &opts)?;
    let out = RenderOutput {
        rgb: with_suffix(&args.out, "_rgb.png"),
        depth: with_suffix(&args.out, "_depth.pfm"),
        alpha: with_suffix(&args.out, "_alpha.png"),
        hash: sha256_hex(&target.canonical_bytes()),
    };
    write_png_rgb8(&out.rgb, target.width, target.height, &target.rgb8_srgb())?;
    write_pfm(&out.depth, target.width, target.height, &target.depth)?;
    write_png_gray8(&out.alpha, target.width, target.height, &target.alpha8())?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LidarOutput {
    pub points: usize,
    pub rays: usize,
    pub hash: String,
}

pub fn lidar(args: &LidarArgs) -> CliResult<LidarOutput> {
    let scene = scene_at(&args.scene, args.poses.as_deref(), args.t)?;
    let model = scene.lidar(&args.lidar)?;
    let tracer = scene.build_tracer(&TracerRegistry::default(), &args.tracer)?;
    let cloud = scene.scan(&args.lidar, tracer.as_ref())?;
    let encoding = if args.binary {
        CloudEncoding::Binary
    } else {
        CloudEncoding::Ascii
    };
    save_cloud(&cloud, &args.out, encoding)?;
    // hash the binary PLY encoding so the value does not depend on --binary
    let canonical = splatsim::io::encode_cloud_ply(&cloud, CloudEncoding::Binary);
    Ok(LidarOutput {
        points: cloud.len(),
        rays: model.ray_count(),
        hash: sha256_hex(&canonical),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvertOutput {
    pub input_count: usize,
    pub output_count: usize,
    /// gs2mesh only: distances from primitive means to the output surface.
    pub self_check: Option<SelfCheck>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfCheck {
    pub max: f64,
    pub median: f64,
    pub voxel_size: f64,
}

pub fn convert(args: &ConvertArgs) -> CliResult<ConvertOutput> {
    match args.direction {
        Direction::Mesh2gs => {
            let mesh = load_mesh(&args.input)?;
            let field = mesh_to_gaussians(&mesh);
            save_splat_ply(&field, &args.out)?;
            Ok(ConvertOutput {
                input_count: mesh.faces.len(),
                output_count: field.len(),
                self_check: None,
            })
        }
        Direction::Gs2mesh => {
            let field = load_splat_ply(&args.input)?;
            let params = FusionParams {
                n_views: args.views,
                resolution: args.resolution,
                voxel_size: args.voxel_size,
                target_faces: args.target_faces,
                ..Default::default()
            };
            let (mesh, volume) = gaussians_to_mesh_with_volume(&field, &params)?;
            if let Some(p) = &args.dump_volume {
                volume.write_raw(p)?;
            }
            save_mesh(&mesh, &args.out)?;
            let grid = TriangleGrid::new(&mesh);
            let mut d: Vec<f64> = field.primitives.iter().map(|p| grid.distance(&p.mean)).collect();
            d.sort_by(f64::total_cmp);
            Ok(ConvertOutput {
                input_count: field.len(),
                output_count: mesh.faces.len(),
                self_check: Some(SelfCheck {
                    max: d.last().copied().unwrap_or(0.0),
                    median: d.get(d.len() / 2).copied().unwrap_or(0.0),
                    voxel_size: volume.voxel_size,
                }),
            })
        }
    }
}

pub const AUGMENT_MANIFEST: &str = "augment_manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentManifest {
    pub config: AugmentationConfig,
    pub frames: Vec<AugmentedFrame>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedFrame {
    pub file: String,
    #[serde(flatten)]
    pub params: FrameParams,
}

fn list_pngs(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for e in entries {
        let path = e.map_err(|e| CliError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn augment(args: &AugmentArgs, seed_override: Option<u64>) -> CliResult<AugmentManifest> {
    let mut config = AugmentationConfig::load(&args.config)?;
    if let Some(s) = seed_override {
        config.seed = s;
    }
    let replay: Option<AugmentManifest> = match &args.replay {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            Some(serde_json::from_str(&text).map_err(|e| {
                CliError::validation(format!("parameter manifest {}: {e}", p.display()))
            })?)
        }
        None => None,
    };
    let files = list_pngs(&args.input)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let augmenter = Augmenter::new(config.clone())?;
    let mut frames = Vec::with_capacity(files.len());
    for (index, path) in files.iter().enumerate() {
        let name = path.file_name().expect("listed file").to_string_lossy().into_owned();
        let dest = args.out.join(&name);
        let params = match &replay {
            Some(m) => m
                .frames
                .iter()
                .find(|f| f.file == name)
                .map(|f| f.params.clone())
                .ok_or_else(|| CliError::validation(format!("parameter manifest has no entry for {name}")))?,
            None => augmenter.sample(index as u64),
        };
        if params.stages.is_empty() {
            std::fs::copy(path, &dest).map_err(|e| CliError::io(&dest, e))?;
        } else {
            let image = read_rgb_image(path)?;
            let out = augmenter.replay(&image, &params)?;
            write_rgb_image(&dest, &out)?;
        }
        frames.push(AugmentedFrame { file: name, params });
    }
    let manifest = AugmentManifest { config, frames };
    let mpath = args.out.join(AUGMENT_MANIFEST);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&mpath, text).map_err(|e| CliError::io(&mpath, e))?;
    Ok(manifest)
}

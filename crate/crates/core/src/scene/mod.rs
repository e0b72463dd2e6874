//! Scene assembly, sensor rigs and pose-stream playback.

mod manifest;

pub use manifest::{NodeDoc, SceneManifest, SensorDoc};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::io::{load_mesh, load_splat_ply};
use crate::raster::{render_view, CameraModel, RasterOptions, Rasterizer, RenderTarget};
use crate::trace::{scan, LidarModel, PointCloud, RayTracer, TracerRegistry, WorldGaussians};
use crate::types::{GaussianField, NodeKind, NodePoses, PoseStream, RigidTransform, SceneNode, TriangleMesh};

/// A sensor rigidly attached to a node, or to the world when `parent` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mounted<S> {
    pub id: String,
    pub parent: Option<String>,
    /// Sensor → parent.
    pub mount: RigidTransform,
    /// Intrinsics; the pose field is overwritten when the sensor is resolved.
    pub sensor: S,
}

/// Everything needed to assemble one node.
#[derive(Debug, Clone)]
pub struct NodeAsset {
    pub id: String,
    pub kind: NodeKind,
    pub field: GaussianField,
    pub mesh: Option<TriangleMesh>,
    pub pose: RigidTransform,
}

#[derive(Debug, Clone)]
pub struct Scene {
    /// All node fields concatenated, in node-local coordinates.
    pub field: GaussianField,
    pub nodes: Vec<SceneNode>,
    pub meshes: BTreeMap<String, TriangleMesh>,
    pub cameras: Vec<Mounted<CameraModel>>,
    pub lidars: Vec<Mounted<LidarModel>>,
    /// Seconds.
    pub clock: f64,
}

impl Scene {
    pub fn assemble(assets: Vec<NodeAsset>, cameras: Vec<Mounted<CameraModel>>,
                    lidars: Vec<Mounted<LidarModel>>) -> Result<Self> {
        let backgrounds = assets.iter().filter(|a| a.kind == NodeKind::Background).count();
        if backgrounds != 1 {
            return Err(Error::validation(format!(
                "scene needs exactly one background node, found {backgrounds}"
            )));
        }
        let mut field = GaussianField::new(0);
        let mut nodes = Vec::with_capacity(assets.len());
        let mut meshes = BTreeMap::new();
        for a in assets {
            if a.kind == NodeKind::Background && !a.pose.is_identity(1e-12) {
                return Err(Error::validation(format!(
                    "background node '{}' must have the identity pose",
                    a.id
                )));
            }
            a.field.validate()?;
            let range = field.append_node(&a.id, &a.field)?;
            if let Some(m) = a.mesh {
                meshes.insert(a.id.clone(), m);
            }
            nodes.push(SceneNode {
                id: a.id,
                kind: a.kind,
                pose: a.pose,
                range,
            });
        }
        let scene = Self {
            field,
            nodes,
            meshes,
            cameras,
            lidars,
            clock: 0.0,
        };
        scene.validate_sensors()?;
        Ok(scene)
    }

    fn validate_sensors(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        let parents = self
            .cameras
            .iter()
            .map(|c| (&c.id, &c.parent))
            .chain(self.lidars.iter().map(|l| (&l.id, &l.parent)));
        for (id, parent) in parents {
            if !ids.insert(id.as_str()) {
                return Err(Error::validation(format!("duplicate sensor id '{id}'")));
            }
            if let Some(p) = parent {
                if self.node(p).is_none() {
                    return Err(Error::validation(format!(
                        "sensor '{id}' is mounted on unknown node '{p}'"
                    )));
                }
            }
        }
        for c in &self.cameras {
            c.sensor.validate()?;
        }
        for l in &self.lidars {
            l.sensor.validate()?;
        }
        Ok(())
    }

    pub fn node(&self, id: &str) -> Option<&SceneNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_poses(&self) -> NodePoses {
        let mut poses = NodePoses::new();
        for n in &self.nodes {
            poses.insert(n.id.clone(), n.pose);
        }
        poses
    }

    /// Sensor → world for a mount.
    fn sensor_to_world(&self, parent: &Option<String>, mount: &RigidTransform) -> RigidTransform {
        match parent.as_deref().and_then(|p| self.node(p)) {
            Some(node) => node.pose.compose(mount),
            None => *mount,
        }
    }

    pub fn camera(&self, id: &str) -> Result<CameraModel> {
        let m = self.cameras.iter().find(|c| c.id == id).ok_or_else(|| Error::Unknown {
            kind: "camera",
            name: id.to_string(),
            available: self.cameras.iter().map(|c| c.id.as_str()).collect::<Vec<_>>().join(", "),
        })?;
        let mut cam = m.sensor.clone();
        cam.pose = self.sensor_to_world(&m.parent, &m.mount).inverse();
        Ok(cam)
    }

    pub fn lidar(&self, id: &str) -> Result<LidarModel> {
        let m = self.lidars.iter().find(|l| l.id == id).ok_or_else(|| Error::Unknown {
            kind: "lidar",
            name: id.to_string(),
            available: self.lidars.iter().map(|l| l.id.as_str()).collect::<Vec<_>>().join(", "),
        })?;
        let mut lidar = m.sensor.clone();
        lidar.pose = self.sensor_to_world(&m.parent, &m.mount);
        Ok(lidar)
    }

    /// Moves interactive nodes to their stream poses at `t`. Nodes without a
    /// record at or before `t` keep their current pose.
    pub fn step_to(&mut self, stream: &PoseStream, t: f64) -> Result<()> {
        if !t.is_finite() || t < self.clock {
            return Err(Error::validation(format!(
                "cannot step to t={t}: clock is already at {}",
                self.clock
            )));
        }
        for id in stream.node_ids() {
            match self.node(id) {
                None => return Err(Error::validation(format!("pose stream names unknown node '{id}'"))),
                Some(n) if n.kind == NodeKind::Background => {
                    return Err(Error::validation(format!(
                        "pose stream drives background node '{id}'"
                    )))
                }
                Some(_) => {}
            }
        }
        for node in &mut self.nodes {
            if node.kind != NodeKind::Interactive {
                continue;
            }
            if let Some(pose) = stream.sample(&node.id, t) {
                node.pose = pose;
            }
        }
        self.clock = t;
        Ok(())
    }

    pub fn render(&self, camera_id: &str, backend: &dyn Rasterizer, opts: &RasterOptions) -> Result<RenderTarget> {
        let cam = self.camera(camera_id)?;
        Ok(render_view(&self.field, &self.node_poses(), &cam, backend, opts))
    }

    pub fn build_tracer(&self, registry: &TracerRegistry, name: &str) -> Result<Box<dyn RayTracer>> {
        let world = Arc::new(WorldGaussians::from_field(&self.field, &self.node_poses()));
        registry.build(name, world)
    }

    pub fn scan(&self, lidar_id: &str, tracer: &dyn RayTracer) -> Result<PointCloud> {
        scan(tracer, &self.lidar(lidar_id)?)
    }
}

/// Loads a manifest and every asset it references.
pub fn load_scene(manifest_path: &Path) -> Result<Scene> {
    let manifest = SceneManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut seen = BTreeSet::new();
    let mut assets = Vec::with_capacity(manifest.nodes.len());
    for n in &manifest.nodes {
        if !seen.insert(n.id.as_str()) {
            return Err(Error::validation(format!("duplicate node id '{}'", n.id)));
        }
        let pose = n
            .pose
            .to_transform()
            .ok_or_else(|| Error::validation(format!("node '{}': degenerate pose", n.id)))?;
        let field = load_splat_ply(&base.join(&n.splat))?;
        let mesh = n.mesh.as_ref().map(|m| load_mesh(&base.join(m))).transpose()?;
        assets.push(NodeAsset {
            id: n.id.clone(),
            kind: n.kind,
            field,
            mesh,
            pose,
        });
    }
    let mut cameras = Vec::new();
    let mut lidars = Vec::new();
    for s in &manifest.sensors {
        match s {
            SensorDoc::Camera { id, parent, mount, fx, fy, cx, cy, width, height, near, far } => {
                cameras.push(Mounted {
                    id: id.clone(),
                    parent: parent.clone(),
                    mount: mount_transform(id, mount)?,
                    sensor: CameraModel {
                        fx: *fx,
                        fy: *fy,
                        cx: *cx,
                        cy: *cy,
                        width: *width,
                        height: *height,
                        pose: RigidTransform::identity(),
                        near: *near,
                        far: *far,
                    },
                });
            }
            SensorDoc::Lidar {
                id,
                parent,
                mount,
                channels_deg,
                channel_count,
                min_elevation_deg,
                max_elevation_deg,
                azimuth_step_deg,
                max_range,
                alpha_threshold,
            } => {
                let elevations = match (channels_deg, channel_count, min_elevation_deg, max_elevation_deg) {
                    (Some(list), None, None, None) => list.iter().map(|d| d.to_radians()).collect(),
                    (None, Some(n), Some(lo), Some(hi)) => {
                        LidarModel::uniform(*n, lo.to_radians(), hi.to_radians(), 1.0, 1.0).channels
                    }
                    _ => {
                        return Err(Error::validation(format!(
                            "lidar '{id}': give either channels_deg or channel_count with min/max_elevation_deg"
                        )))
                    }
                };
                lidars.push(Mounted {
                    id: id.clone(),
                    parent: parent.clone(),
                    mount: mount_transform(id, mount)?,
                    sensor: LidarModel {
                        channels: elevations,
                        azimuth_step: azimuth_step_deg.to_radians(),
                        max_range: *max_range,
                        pose: RigidTransform::identity(),
                        alpha_threshold: *alpha_threshold,
                    },
                });
            }
        }
    }
    Scene::assemble(assets, cameras, lidars)
}

fn mount_transform(id: &str, doc: &crate::types::PoseDoc) -> Result<RigidTransform> {
    doc.to_transform()
        .ok_or_else(|| Error::validation(format!("sensor '{id}': degenerate mount pose")))
}

//! On-disk layout.
//!
//! A scene directory holds `scene.pcd` (the observed cloud, see
//! [`crate::io::pcd`]) and `scene.json`:
//!
//! ```json
//! { "camera": { "fx": .., "fy": .., "cx": .., "cy": .., "width": .., "height": ..,
//!               "rotation": [[..],[..],[..]], "translation": [..] },
//!   "truth": [ { "model_id": "box", "pose": { "x": .., "y": .., "theta": .. } } ],
//!   "noise_sigma": 0.0, "seed": 0 }
//! ```
//!
//! `rotation` and `translation` map world points into the camera frame.
//! A model directory holds `models.json`, a list of
//! `{ "id", "mesh", "symmetric", "volume"? }` entries whose `mesh` is an OBJ
//! path relative to the directory. Pose files are JSON arrays of
//! `{ "model_id", "pose" }` records.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{CameraModel, VolumeApprox};
use crate::io::{obj, pcd};
use crate::msgt::{ObjectModel, ObjectPoseHypothesis};

use super::synth::GroundTruthScene;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMeta {
    pub camera: CameraModel,
    pub truth: Vec<ObjectPoseHypothesis>,
    #[serde(default)]
    pub noise_sigma: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEntry {
    pub id: String,
    pub mesh: String,
    #[serde(default)]
    pub symmetric: bool,
    /// Overrides the inscribed cylinder derived from the mesh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeApprox>,
}

pub fn save_scene(dir: impl AsRef<Path>, scene: &GroundTruthScene) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    pcd::write(dir.join("scene.pcd"), &scene.observed)?;
    let meta = SceneMeta {
        camera: scene.camera.clone(),
        truth: scene.truth.clone(),
        noise_sigma: scene.noise_sigma,
        seed: scene.seed,
    };
    std::fs::write(dir.join("scene.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load_scene(dir: impl AsRef<Path>) -> Result<GroundTruthScene> {
    let dir = dir.as_ref();
    let observed = pcd::read(dir.join("scene.pcd"))?;
    let meta: SceneMeta = serde_json::from_str(&std::fs::read_to_string(dir.join("scene.json"))?)?;
    Ok(GroundTruthScene {
        observed,
        camera: meta.camera,
        truth: meta.truth,
        noise_sigma: meta.noise_sigma,
        seed: meta.seed,
    })
}

pub fn save_models(dir: impl AsRef<Path>, models: &[ObjectModel]) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(models.len());
    for m in models {
        let file = format!("{}.obj", m.id);
        obj::write(dir.join(&file), &m.mesh)?;
        entries.push(ModelEntry {
            id: m.id.clone(),
            mesh: file,
            symmetric: m.rotationally_symmetric,
            volume: Some(m.volume),
        });
    }
    std::fs::write(
        dir.join("models.json"),
        serde_json::to_string_pretty(&entries)?,
    )?;
    Ok(())
}

pub fn load_models(dir: impl AsRef<Path>) -> Result<Vec<ObjectModel>> {
    let dir = dir.as_ref();
    let entries: Vec<ModelEntry> =
        serde_json::from_str(&std::fs::read_to_string(dir.join("models.json"))?)?;
    entries
        .into_iter()
        .map(|e| {
            let mesh = obj::read(dir.join(&e.mesh))?;
            match e.volume {
                Some(v) => Ok(ObjectModel::with_volume(e.id, mesh, v, e.symmetric)),
                None => ObjectModel::new(e.id, mesh, e.symmetric),
            }
        })
        .collect()
}

pub fn save_poses(path: impl AsRef<Path>, poses: &[ObjectPoseHypothesis]) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(poses)?)?;
    Ok(())
}

pub fn load_poses(path: impl AsRef<Path>) -> Result<Vec<ObjectPoseHypothesis>> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use nalgebra::{Isometry3, Vector3};
use serde::{Deserialize, Serialize};

use crate::align::IcpConfig;
use crate::cost::DEFAULT_DELTA;
use crate::error::{Error, Result};
use crate::geometry::{transform_cloud, CameraModel, Point3, PointCloud, RigidPose2D};
use crate::msgt::{GridSpec, ObjectModel, ObjectPoseHypothesis, SceneTask};
use crate::search::{solve_with_observer, SearchConfig, SearchObserver};

use super::eval::{evaluate, histogram_csv, EvalReport, SearchSummary, Thresholds};
use super::plane::{gravity_alignment, remove_plane};
use super::synth::GroundTruthScene;

/// Tabletop removal settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneConfig {
    pub iterations: usize,
    pub inlier_eps: f64,
    pub seed: u64,
    /// Move the scene into the frame where the table is `z = 0`.
    pub align: bool,
}

impl Default for PlaneConfig {
    fn default() -> Self {
        Self {
            iterations: 200,
            inlier_eps: 0.004,
            seed: 0,
            align: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub delta: f64,
    pub xy_step: f64,
    pub yaw_step: f64,
    /// ICP correspondence cap in meters; `None` disables refinement.
    pub icp_cap: Option<f64>,
    pub search: SearchConfig,
    /// `None` skips tabletop removal.
    pub plane: Option<PlaneConfig>,
    pub thresholds: Thresholds,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            xy_step: GridSpec::DEFAULT_XY_STEP,
            yaw_step: GridSpec::DEFAULT_YAW_STEP,
            icp_cap: Some(GridSpec::DEFAULT_XY_STEP / 2.0),
            search: SearchConfig::default(),
            plane: None,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessSummary {
    pub input_points: usize,
    pub kept_points: usize,
    pub plane: Option<[f64; 4]>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub preprocess: PreprocessSummary,
    pub search: SearchSummary,
    /// Empty when the search found no goal.
    pub poses: Vec<ObjectPoseHypothesis>,
    /// Truth expressed in the frame the search ran in.
    pub truth: Vec<ObjectPoseHypothesis>,
    /// `None` when the search found no goal.
    pub report: Option<EvalReport>,
}

fn planar_in(change: &Isometry3<f64>, pose: &RigidPose2D) -> RigidPose2D {
    let p = change * Point3::new(pose.x, pose.y, 0.0);
    let heading = change.rotation * Vector3::new(pose.theta.cos(), pose.theta.sin(), 0.0);
    RigidPose2D::new(p.x, p.y, heading.y.atan2(heading.x))
}

/// A search task built from a raw observation, with what preprocessing did.
#[derive(Debug, Clone)]
pub struct PreparedTask {
    pub task: SceneTask,
    pub preprocess: PreprocessSummary,
    /// World-frame change applied by gravity alignment, if any.
    pub frame_change: Option<Isometry3<f64>>,
}

/// Moves the cloud into the world frame, optionally removes (and aligns to)
/// the tabletop, and builds the search task for `required` objects on a grid
/// covering what remains. Errors carry the stage (`preprocess` or `task`).
pub fn prepare_task(
    observed: &PointCloud,
    camera: &CameraModel,
    required: Vec<String>,
    models: &[ObjectModel],
    cfg: &ExperimentConfig,
) -> Result<PreparedTask> {
    let world = observed.to_world(camera);
    let input_points = world.len();
    let (cloud, camera, frame_change, plane, warning) = match &cfg.plane {
        None => (world, camera.clone(), None, None, None),
        Some(pc) => {
            let removal = remove_plane(&world, pc.iterations, pc.inlier_eps, pc.seed)
                .map_err(|e| e.at_stage("preprocess"))?;
            match (removal.plane, pc.align) {
                (Some(coeffs), true) => {
                    let change = gravity_alignment(&coeffs);
                    (
                        transform_cloud(&removal.filtered, &change),
                        camera.reframed(&change),
                        Some(change),
                        removal.plane,
                        removal.warning,
                    )
                }
                _ => (
                    removal.filtered,
                    camera.clone(),
                    None,
                    removal.plane,
                    removal.warning,
                ),
            }
        }
    };
    let preprocess = PreprocessSummary {
        input_points,
        kept_points: cloud.len(),
        plane,
        warning,
    };

    let task = (|| {
        if required.is_empty() {
            return Err(Error::InvalidConfig(
                "scene must contain at least one object (K >= 1)".into(),
            ));
        }
        let grid = GridSpec::covering(&cloud, cfg.xy_step, cfg.yaw_step)?;
        let icp = cfg.icp_cap.map(|cap| IcpConfig {
            max_correspondence: cap,
            ..IcpConfig::for_grid_step(cfg.xy_step)
        });
        let task = SceneTask::new(cloud, camera, models.iter().cloned(), required, grid)?
            .with_delta(cfg.delta)
            .with_icp(icp);
        task.validate()?;
        Ok(task)
    })()
    .map_err(|e| e.at_stage("task"))?;

    Ok(PreparedTask {
        task,
        preprocess,
        frame_change,
    })
}

/// Preprocess, search and evaluate one scene. Errors carry the stage that
/// raised them (`preprocess`, `task`, `solve` or `evaluate`).
pub fn run_experiment(
    scene: &GroundTruthScene,
    models: &[ObjectModel],
    cfg: &ExperimentConfig,
    observer: &mut dyn SearchObserver,
) -> Result<ExperimentOutcome> {
    let required: Vec<String> = scene.truth.iter().map(|t| t.model_id.clone()).collect();
    let PreparedTask {
        task,
        preprocess,
        frame_change,
    } = prepare_task(&scene.observed, &scene.camera, required, models, cfg)?;
    let truth: Vec<ObjectPoseHypothesis> = match &frame_change {
        Some(change) => scene
            .truth
            .iter()
            .map(|t| ObjectPoseHypothesis::new(t.model_id.clone(), planar_in(change, &t.pose)))
            .collect(),
        None => scene.truth.clone(),
    };

    let result =
        solve_with_observer(&task, &cfg.search, observer).map_err(|e| e.at_stage("solve"))?;
    let search = SearchSummary::from(&result);
    let poses = result.assignments().to_vec();
    let report = if result.goal.is_some() {
        let symmetric: BTreeSet<String> = task
            .models
            .values()
            .filter(|m| m.rotationally_symmetric)
            .map(|m| m.id.clone())
            .collect();
        let mut report = evaluate(&poses, &truth, &cfg.thresholds, &symmetric)
            .map_err(|e| e.at_stage("evaluate"))?;
        report.search = Some(search.clone());
        Some(report)
    } else {
        None
    };
    Ok(ExperimentOutcome {
        config: cfg.clone(),
        preprocess,
        search,
        poses,
        truth,
        report,
    })
}

/// Writes `results.json` (the whole outcome) and, when a report exists,
/// `histogram.csv` (see [`histogram_csv`]) into `dir`.
pub fn write_outputs(dir: impl AsRef<Path>, outcome: &ExperimentOutcome) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    std::fs::write(
        dir.join("results.json"),
        serde_json::to_string_pretty(outcome)?,
    )?;
    if let Some(report) = &outcome.report {
        std::fs::write(dir.join("histogram.csv"), histogram_csv(report))?;
    }
    Ok(())
}

/// Library keyed by id, as the synthesizer expects.
pub fn index_models(models: &[ObjectModel]) -> BTreeMap<String, ObjectModel> {
    models.iter().map(|m| (m.id.clone(), m.clone())).collect()
}

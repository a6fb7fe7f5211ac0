use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use serde_json::json;

use scenesearch_core::harness::{
    builtin_models, default_camera, evaluate, histogram_csv, index_models, load_models, load_poses,
    load_scene, prepare_task, run_experiment, save_models, save_poses, save_scene,
    synthesize_scene, synthesize_tabletop, write_outputs, ExperimentConfig, GroundTruthScene,
    PlaneConfig, SceneMeta, SearchSummary, Thresholds,
};
use scenesearch_core::io::pcd;
use scenesearch_core::msgt::{ObjectModel, ObjectPoseHypothesis};
use scenesearch_core::search::{solve_with_observer, SearchConfig, SearchResult};
use scenesearch_core::{Error, RigidPose2D};

use crate::progress::{emit, JsonProgress};
use crate::{EvalArgs, ExperimentArgs, ModelArgs, SceneSpec, SearchArgs, SolveArgs, SynthArgs};

/// A command line that parsed but makes no sense.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Process exit status for a failed command.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e.root() {
                Error::InvalidConfig(_) | Error::OutsideFrustum(_) | Error::IdMismatch(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn search_exit(result_has_goal: bool, timed_out: bool) -> ExitCode {
    match (result_has_goal, timed_out) {
        (true, _) => ExitCode::SUCCESS,
        (false, true) => ExitCode::from(4),
        (false, false) => ExitCode::from(3),
    }
}

fn models(args: &ModelArgs) -> Result<Vec<ObjectModel>> {
    match &args.models {
        Some(dir) => {
            load_models(dir).with_context(|| format!("loading models from {}", dir.display()))
        }
        None => Ok(builtin_models()),
    }
}

fn parse_object(spec: &str) -> Result<ObjectPoseHypothesis> {
    let bad = || usage(format!("object `{spec}` is not ID:X,Y,YAW_DEG"));
    let (id, rest) = spec.split_once(':').ok_or_else(bad)?;
    let values: Vec<f64> = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [x, y, yaw] = values[..] else {
        return Err(bad());
    };
    if id.is_empty() || !(x.is_finite() && y.is_finite() && yaw.is_finite()) {
        return Err(bad());
    }
    Ok(ObjectPoseHypothesis::new(
        id,
        RigidPose2D::new(x, y, yaw.to_radians()),
    ))
}

fn synthesize(spec: &SceneSpec, models: &[ObjectModel], seed: u64) -> Result<GroundTruthScene> {
    if spec.objects.is_empty() {
        return Err(usage("at least one --object is required"));
    }
    if !(spec.noise.is_finite() && spec.noise >= 0.0) {
        return Err(usage("--noise must be a non-negative number"));
    }
    let truth = spec
        .objects
        .iter()
        .map(|o| parse_object(o))
        .collect::<Result<Vec<_>>>()?;
    let library = index_models(models);
    let camera = default_camera();
    let scene = match spec.table {
        Some(half) => synthesize_tabletop(&library, &truth, half, &camera, spec.noise, seed)?,
        None => synthesize_scene(&library, &truth, &camera, spec.noise, seed)?,
    };
    Ok(scene)
}

fn experiment_config(args: &SearchArgs) -> Result<ExperimentConfig> {
    let time_limit = args
        .time_limit
        .map(|s| {
            Duration::try_from_secs_f64(s)
                .map_err(|_| usage(format!("--time-limit {s} is not a duration")))
        })
        .transpose()?;
    if !(args.icp_cap.is_finite() && args.icp_cap >= 0.0) {
        return Err(usage("--icp-cap must be a non-negative number"));
    }
    let defaults = SearchConfig::default();
    Ok(ExperimentConfig {
        delta: args.delta,
        xy_step: args.grid_xy,
        yaw_step: args.grid_yaw.to_radians(),
        icp_cap: (args.icp_cap > 0.0).then_some(args.icp_cap),
        search: SearchConfig {
            w: args.w,
            time_limit,
            workers: args.workers.unwrap_or(defaults.workers),
            ..defaults
        },
        plane: args.plane.then(|| PlaneConfig {
            inlier_eps: args.plane_eps,
            seed: args.seed,
            ..PlaneConfig::default()
        }),
        thresholds: Thresholds::default(),
    })
}

fn pose_records(poses: &[ObjectPoseHypothesis]) -> serde_json::Value {
    serde_json::to_value(poses).unwrap_or_default()
}

fn result_record(event: &str, result: &SearchResult) -> serde_json::Value {
    json!({
        "event": event,
        "found": result.goal.is_some(),
        "cost": result.cost,
        "bound_certificate": result.bound_certificate,
        "expansions": result.expansions,
        "generated": result.generated,
        "wall_time_secs": result.wall_time.as_secs_f64(),
        "timed_out": result.timed_out,
        "poses": pose_records(result.assignments()),
    })
}

pub fn synth(args: SynthArgs) -> Result<ExitCode> {
    let models = models(&args.models)?;
    let scene = synthesize(&args.spec, &models, args.seed)?;
    save_scene(&args.out, &scene)
        .with_context(|| format!("writing scene to {}", args.out.display()))?;
    save_models(&args.out, &models)?;
    emit(&json!({
        "event": "synth",
        "out": args.out,
        "points": scene.observed.len(),
        "truth": pose_records(&scene.truth),
    }));
    Ok(ExitCode::SUCCESS)
}

/// Cloud path plus the metadata file beside it, if any.
fn scene_files(path: &Path) -> (PathBuf, Option<PathBuf>) {
    let (cloud, dir) = if path.is_dir() {
        (path.join("scene.pcd"), Some(path.to_path_buf()))
    } else {
        (path.to_path_buf(), path.parent().map(Path::to_path_buf))
    };
    let meta = dir.map(|d| d.join("scene.json")).filter(|m| m.is_file());
    (cloud, meta)
}

fn read_meta(path: &Path) -> Result<SceneMeta> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn solve(args: SolveArgs) -> Result<ExitCode> {
    let models = models(&args.models)?;
    let cfg = experiment_config(&args.search)?;
    let (cloud_path, meta_path) = scene_files(&args.scene);
    let observed =
        pcd::read(&cloud_path).with_context(|| format!("reading {}", cloud_path.display()))?;
    let meta = meta_path.as_deref().map(read_meta).transpose()?;
    let required = if !args.ids.is_empty() {
        args.ids.clone()
    } else if let Some(m) = &meta {
        m.truth.iter().map(|t| t.model_id.clone()).collect()
    } else {
        return Err(usage(
            "no scene.json beside the cloud; pass the object ids with --ids",
        ));
    };
    let camera = meta.map_or_else(default_camera, |m| m.camera);

    let prepared = prepare_task(&observed, &camera, required, &models, &cfg)?;
    let mut progress = JsonProgress::new(!args.search.quiet);
    let result = solve_with_observer(&prepared.task, &cfg.search, &mut progress)?;

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        save_poses(out.join("poses.json"), result.assignments())?;
        let summary = json!({
            "config": cfg,
            "preprocess": prepared.preprocess,
            "search": SearchSummary::from(&result),
        });
        std::fs::write(
            out.join("search.json"),
            serde_json::to_string_pretty(&summary)?,
        )?;
    }
    emit(&result_record("result", &result));
    Ok(search_exit(result.goal.is_some(), result.timed_out))
}

fn read_truth(path: &Path) -> Result<Vec<ObjectPoseHypothesis>> {
    let file = if path.is_dir() {
        path.join("scene.json")
    } else {
        path.to_path_buf()
    };
    let text =
        std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    if let Ok(meta) = serde_json::from_str::<SceneMeta>(&text) {
        return Ok(meta.truth);
    }
    load_poses(&file).with_context(|| format!("parsing {}", file.display()))
}

pub fn eval(args: EvalArgs) -> Result<ExitCode> {
    let models = models(&args.models)?;
    let predicted =
        load_poses(&args.poses).with_context(|| format!("reading {}", args.poses.display()))?;
    let truth = read_truth(&args.truth)?;
    let symmetric: BTreeSet<String> = models
        .iter()
        .filter(|m| m.rotationally_symmetric)
        .map(|m| m.id.clone())
        .collect();
    let report = evaluate(&predicted, &truth, &Thresholds::default(), &symmetric)?;
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(
            out.join("report.json"),
            serde_json::to_string_pretty(&report)?,
        )?;
        std::fs::write(out.join("histogram.csv"), histogram_csv(&report))?;
    }
    let mut record = serde_json::to_value(&report)?;
    record["event"] = json!("report");
    emit(&record);
    Ok(ExitCode::SUCCESS)
}

pub fn experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let models = models(&args.models)?;
    let cfg = experiment_config(&args.search)?;
    let scene = match &args.scene {
        Some(dir) => {
            load_scene(dir).with_context(|| format!("loading scene from {}", dir.display()))?
        }
        None => synthesize(&args.spec, &models, args.search.seed)?,
    };
    let mut progress = JsonProgress::new(!args.search.quiet);
    let outcome = run_experiment(&scene, &models, &cfg, &mut progress)?;
    if let Some(out) = &args.out {
        write_outputs(out, &outcome)?;
    }
    let s = &outcome.search;
    emit(&json!({
        "event": "result",
        "found": outcome.report.is_some(),
        "cost": s.cost,
        "bound_certificate": s.bound_certificate,
        "expansions": s.expansions,
        "generated": s.generated,
        "wall_time_secs": s.wall_time_secs,
        "timed_out": s.timed_out,
        "poses": pose_records(&outcome.poses),
        "errors": outcome.report.as_ref().map(|r| &r.objects),
    }));
    Ok(search_exit(outcome.report.is_some(), s.timed_out))
}

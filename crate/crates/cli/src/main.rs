//! `scenesearch`: synthesize tabletop scenes, localize the objects in them
//! and score the result.
//!
//! Every numeric flag can also be set through an environment variable named
//! `SCENESEARCH_<FLAG>` (for example `SCENESEARCH_DELTA`, `SCENESEARCH_W`,
//! `SCENESEARCH_GRID_XY`). Command-line values win over the environment.
//!
//! Exit codes: 0 success, 1 other failure, 2 invalid configuration,
//! 3 no feasible assignment, 4 time limit reached without a goal.

mod commands;
mod progress;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "scenesearch",
    version,
    about = "Localize known objects in a depth scene by tree search over rendered hypotheses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a ground-truth scene to a point cloud plus metadata.
    Synth(SynthArgs),
    /// Search for the object poses that best explain a scene.
    Solve(SolveArgs),
    /// Score predicted poses against ground truth.
    Eval(EvalArgs),
    /// Preprocess, solve and evaluate in one run.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Directory holding models.json and the meshes it names; the built-in
    /// library is used when omitted.
    #[arg(long, env = "SCENESEARCH_MODELS")]
    models: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SceneSpec {
    /// Object placement `ID:X,Y,YAW_DEG` in meters and degrees; repeatable.
    #[arg(long = "object", value_name = "ID:X,Y,YAW")]
    objects: Vec<String>,
    /// Per-axis Gaussian noise added to the observation, meters.
    #[arg(long, env = "SCENESEARCH_NOISE", default_value_t = 0.0)]
    noise: f64,
    /// Add a square table of this half-width (meters) under the objects.
    #[arg(long, env = "SCENESEARCH_TABLE")]
    table: Option<f64>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    spec: SceneSpec,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long, env = "SCENESEARCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Output directory for scene.pcd, scene.json and the model library.
    #[arg(long, env = "SCENESEARCH_OUT")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Sensor noise threshold for the explanation cost, meters.
    #[arg(long, env = "SCENESEARCH_DELTA", default_value_t = 0.003)]
    delta: f64,
    /// Suboptimality factor (>= 1).
    #[arg(long, env = "SCENESEARCH_W", default_value_t = 3.0)]
    w: f64,
    /// Position grid step, meters.
    #[arg(long, env = "SCENESEARCH_GRID_XY", default_value_t = 0.04)]
    grid_xy: f64,
    /// Yaw grid step, degrees.
    #[arg(long, env = "SCENESEARCH_GRID_YAW", default_value_t = 22.5)]
    grid_yaw: f64,
    /// Wall-clock budget in seconds; the best goal so far is returned.
    #[arg(long, env = "SCENESEARCH_TIME_LIMIT")]
    time_limit: Option<f64>,
    /// Worker threads for successor generation (default: all cores).
    #[arg(long, env = "SCENESEARCH_WORKERS")]
    workers: Option<usize>,
    /// ICP correspondence cap in meters; 0 disables refinement.
    #[arg(long, env = "SCENESEARCH_ICP_CAP", default_value_t = 0.02)]
    icp_cap: f64,
    /// Remove the dominant plane (tabletop) before searching.
    #[arg(long, env = "SCENESEARCH_PLANE")]
    plane: bool,
    /// Inlier distance for tabletop removal, meters.
    #[arg(long, env = "SCENESEARCH_PLANE_EPS", default_value_t = 0.004)]
    plane_eps: f64,
    /// Seed for RANSAC (and for synthesis in `experiment`).
    #[arg(long, env = "SCENESEARCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Suppress JSON-lines progress records.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Scene point cloud (.pcd) or a directory with scene.pcd; a scene.json
    /// beside it supplies the camera and object ids.
    #[arg(long, env = "SCENESEARCH_SCENE")]
    scene: PathBuf,
    /// Comma-separated ids of the objects present (overrides scene.json).
    #[arg(long, value_delimiter = ',')]
    ids: Vec<String>,
    #[command(flatten)]
    models: ModelArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory for poses.json and search.json.
    #[arg(long, env = "SCENESEARCH_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Predicted poses (JSON list, as written by `solve`).
    #[arg(long)]
    poses: PathBuf,
    /// Ground truth: a scene directory, its scene.json, or a poses file.
    #[arg(long)]
    truth: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    /// Output directory for report.json and histogram.csv.
    #[arg(long, env = "SCENESEARCH_OUT")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Scene directory with scene.pcd and scene.json; otherwise a scene is
    /// synthesized from the `--object` flags.
    #[arg(long, env = "SCENESEARCH_SCENE")]
    scene: Option<PathBuf>,
    #[command(flatten)]
    spec: SceneSpec,
    #[command(flatten)]
    models: ModelArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory for results.json and histogram.csv.
    #[arg(long, env = "SCENESEARCH_OUT")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Solve(a) => commands::solve(a),
        Command::Eval(a) => commands::eval(a),
        Command::Experiment(a) => commands::experiment(a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}

//! End-to-end plumbing around the search: a built-in model library, synthetic
//! scenes with ground truth, tabletop removal, evaluation against truth and
//! experiment orchestration with machine-readable outputs.

mod eval;
mod experiment;
mod files;
mod library;
mod plane;
mod synth;

pub use eval::{evaluate, histogram_csv, EvalReport, ObjectError, SearchSummary, Thresholds};
pub use experiment::index_models;
pub use experiment::{
    prepare_task, run_experiment, write_outputs, ExperimentConfig, ExperimentOutcome, PlaneConfig,
    PreparedTask, PreprocessSummary,
};
pub use files::{
    load_models, load_poses, load_scene, save_models, save_poses, save_scene, ModelEntry, SceneMeta,
};
pub use library::{builtin_model, builtin_models, BUILTIN_IDS};
pub use plane::{gravity_alignment, remove_plane, PlaneRemoval, MIN_INLIER_FRACTION};
pub use synth::{
    check_in_frustum, default_camera, synthesize_scene, synthesize_tabletop, GroundTruthScene,
};

//! Fixtures shared by the benchmarks.

use std::f64::consts::FRAC_PI_2;

use scenesearch_core::harness::{
    builtin_models, default_camera, index_models, synthesize_scene, GroundTruthScene,
};
use scenesearch_core::msgt::{GridSpec, ObjectPoseHypothesis, SceneTask};
use scenesearch_core::RigidPose2D;

/// Two objects on the default camera's table, lightly noisy.
pub fn two_object_scene() -> GroundTruthScene {
    let truth = vec![
        ObjectPoseHypothesis::new("box", RigidPose2D::new(-0.05, 0.03, 0.4)),
        ObjectPoseHypothesis::new("cylinder", RigidPose2D::new(0.06, -0.04, 0.0)),
    ];
    synthesize_scene(
        &index_models(&builtin_models()),
        &truth,
        &default_camera(),
        0.001,
        1,
    )
    .expect("scene")
}

/// Search task for [`two_object_scene`] on a 5 x 5 grid with four yaws.
pub fn two_object_task(icp: bool) -> SceneTask {
    let scene = two_object_scene();
    let grid = GridSpec::new(0.04, FRAC_PI_2, (-0.08, 0.08), (-0.08, 0.08)).expect("grid");
    let task = SceneTask::new(
        scene.observed,
        scene.camera,
        builtin_models(),
        scene.truth.iter().map(|t| t.model_id.clone()).collect(),
        grid,
    )
    .expect("task");
    if icp {
        task
    } else {
        task.with_icp(None)
    }
}

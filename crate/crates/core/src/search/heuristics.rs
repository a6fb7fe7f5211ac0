use serde::{Deserialize, Serialize};

use crate::geometry::{point_in_volume, RigidPose2D, VolumeApprox};
use crate::msgt::{SceneState, SceneTask};

/// Inadmissible heuristics available to the focal queues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    /// Objects still to place; drives the search toward the leaves.
    Depth,
    /// Observed points not yet inside any assigned object's volume.
    Overlap,
}

impl Heuristic {
    /// Value for a state, using the state's cached volume coverage.
    pub fn eval(&self, s: &SceneState, k: usize) -> u64 {
        match self {
            Heuristic::Depth => h_depth(s, k),
            Heuristic::Overlap => s.outside_volumes(),
        }
    }
}

/// Number of assignments left to make.
pub fn h_depth(s: &SceneState, k: usize) -> u64 {
    k.saturating_sub(s.len()) as u64
}

/// Observed points outside the union of assigned volumes, recomputed from scratch.
pub fn h_overlap(s: &SceneState, task: &SceneTask) -> u64 {
    let vols: Vec<(VolumeApprox, RigidPose2D)> = s
        .assignments()
        .iter()
        .map(|a| (task.model(&a.model_id).volume, a.pose))
        .collect();
    let inside = task
        .observed
        .points()
        .iter()
        .filter(|p| vols.iter().any(|(v, pose)| point_in_volume(p, v, pose)))
        .count();
    (task.observed.len() - inside) as u64
}

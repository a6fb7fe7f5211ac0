use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::RigidPose2D;
use crate::msgt::{ObjectPoseHypothesis, SceneTask};

/// Largest joint configuration count the exhaustive oracle will enumerate.
pub const ORACLE_GUARD: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub assignment: Vec<ObjectPoseHypothesis>,
    pub cost: u64,
    /// Number of complete scenes rendered and scored.
    pub evaluated: u64,
    /// Joint assignments skipped because two volumes intersect.
    pub infeasible: u64,
}

/// Exhaustive search over every joint on-grid assignment (no ICP), each
/// scored by a single monolithic render. Assignments that the task deems
/// infeasible are skipped. Ties go to the lexicographically first assignment
/// in `task.required` order.
pub fn brute_force_oracle(task: &SceneTask) -> Result<OracleResult> {
    task.validate()?;
    let per_object: Vec<Vec<RigidPose2D>> = task
        .required
        .iter()
        .map(|id| task.grid.poses(task.model(id).rotationally_symmetric))
        .collect();
    let total = per_object
        .iter()
        .try_fold(1u128, |acc, poses| acc.checked_mul(poses.len() as u128))
        .unwrap_or(u128::MAX);
    if total > ORACLE_GUARD as u128 {
        return Err(Error::GuardExceeded {
            configurations: total,
            limit: ORACLE_GUARD,
        });
    }
    let total = total as u64;

    let decode = |mut index: u64| -> Vec<ObjectPoseHypothesis> {
        let mut out = vec![None; per_object.len()];
        for (i, poses) in per_object.iter().enumerate().rev() {
            let n = poses.len() as u64;
            out[i] = Some(ObjectPoseHypothesis::new(
                task.required[i].clone(),
                poses[(index % n) as usize],
            ));
            index /= n;
        }
        out.into_iter().map(Option::unwrap).collect()
    };

    let scored: Vec<(u64, u64)> = (0..total)
        .into_par_iter()
        .filter_map(|i| {
            let assignment = decode(i);
            task.is_feasible(&assignment)
                .then(|| (task.assignment_cost(&assignment), i))
        })
        .collect();
    let evaluated = scored.len() as u64;
    let (cost, best) = scored.into_iter().min().ok_or_else(|| {
        Error::InvalidConfig("no feasible joint assignment on the pose grid".into())
    })?;

    Ok(OracleResult {
        assignment: decode(best),
        cost,
        evaluated,
        infeasible: total - evaluated,
    })
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{shortest_angular_difference, RigidPose2D};
use crate::msgt::ObjectPoseHypothesis;
use crate::search::SearchResult;

/// Largest number of instances of one model the exact matcher accepts.
const MAX_DUPLICATES: usize = 16;

/// Correctness thresholds: translation in meters, yaw in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub translation: Vec<f64>,
    pub yaw: Vec<f64>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            translation: vec![0.01, 0.05, 0.1],
            yaw: [5.0f64, 10.0, 20.0, 45.0]
                .iter()
                .map(|d| d.to_radians())
                .collect(),
        }
    }
}

/// Error of one prediction against the truth instance it was matched to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectError {
    pub model_id: String,
    pub predicted: RigidPose2D,
    pub truth: RigidPose2D,
    pub translation_error: f64,
    /// Zero for rotationally symmetric models.
    pub yaw_error: f64,
}

impl ObjectError {
    /// Strict comparison against both thresholds.
    pub fn is_correct(&self, dt: f64, dtheta: f64) -> bool {
        self.translation_error < dt && self.yaw_error < dtheta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub cost: Option<u64>,
    pub bound_certificate: f64,
    pub expansions: u64,
    pub generated: u64,
    pub wall_time_secs: f64,
    pub timed_out: bool,
}

impl From<&SearchResult> for SearchSummary {
    fn from(r: &SearchResult) -> Self {
        Self {
            cost: r.cost,
            bound_certificate: r.bound_certificate,
            expansions: r.expansions,
            generated: r.generated,
            wall_time_secs: r.wall_time.as_secs_f64(),
            timed_out: r.timed_out,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// One entry per truth instance, in truth order.
    pub objects: Vec<ObjectError>,
    pub thresholds: Thresholds,
    /// `correct[i][j]`: objects within `translation[i]` and `yaw[j]`.
    pub correct: Vec<Vec<usize>>,
    pub total: usize,
    pub search: Option<SearchSummary>,
}

impl EvalReport {
    pub fn all_correct(&self, dt: f64, dtheta: f64) -> bool {
        self.objects.iter().all(|o| o.is_correct(dt, dtheta))
    }
}

/// Scores predictions against truth.
///
/// Instances of the same model are paired by a minimum-total-translation-error
/// matching; yaw is ignored for ids in `symmetric`. Both lists must hold the
/// same multiset of model ids.
pub fn evaluate(
    predicted: &[ObjectPoseHypothesis],
    truth: &[ObjectPoseHypothesis],
    thresholds: &Thresholds,
    symmetric: &BTreeSet<String>,
) -> Result<EvalReport> {
    let (pred_by_id, truth_by_id) = (group_by_id(predicted), group_by_id(truth));
    if multiset(&pred_by_id) != multiset(&truth_by_id) {
        return Err(Error::IdMismatch(format!(
            "predicted {:?} vs truth {:?}",
            multiset(&pred_by_id),
            multiset(&truth_by_id)
        )));
    }

    let mut objects: Vec<Option<ObjectError>> = vec![None; truth.len()];
    for (id, t_idx) in &truth_by_id {
        let p_idx = &pred_by_id[id];
        if t_idx.len() > MAX_DUPLICATES {
            return Err(Error::InvalidConfig(format!(
                "{} instances of {id:?} exceed the matcher limit of {MAX_DUPLICATES}",
                t_idx.len()
            )));
        }
        let cost: Vec<Vec<f64>> = t_idx
            .iter()
            .map(|&t| {
                p_idx
                    .iter()
                    .map(|&p| translation_error(&predicted[p].pose, &truth[t].pose))
                    .collect()
            })
            .collect();
        let sym = symmetric.contains(*id);
        for (ti, pi) in min_cost_matching(&cost).into_iter().enumerate() {
            let (t, p) = (&truth[t_idx[ti]], &predicted[p_idx[pi]]);
            objects[t_idx[ti]] = Some(ObjectError {
                model_id: t.model_id.clone(),
                predicted: p.pose,
                truth: t.pose,
                translation_error: cost[ti][pi],
                yaw_error: if sym {
                    0.0
                } else {
                    shortest_angular_difference(p.pose.theta, t.pose.theta)
                },
            });
        }
    }
    let objects: Vec<ObjectError> = objects
        .into_iter()
        .map(|o| o.expect("every truth matched"))
        .collect();
    let correct = thresholds
        .translation
        .iter()
        .map(|&dt| {
            thresholds
                .yaw
                .iter()
                .map(|&dy| objects.iter().filter(|o| o.is_correct(dt, dy)).count())
                .collect()
        })
        .collect();
    Ok(EvalReport {
        total: objects.len(),
        objects,
        thresholds: thresholds.clone(),
        correct,
        search: None,
    })
}

fn group_by_id(list: &[ObjectPoseHypothesis]) -> BTreeMap<&str, Vec<usize>> {
    let mut m: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, h) in list.iter().enumerate() {
        m.entry(h.model_id.as_str()).or_default().push(i);
    }
    m
}

fn multiset<'a>(m: &BTreeMap<&'a str, Vec<usize>>) -> Vec<(&'a str, usize)> {
    m.iter().map(|(k, v)| (*k, v.len())).collect()
}

fn translation_error(a: &RigidPose2D, b: &RigidPose2D) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Exact assignment on a square cost matrix by dynamic programming over
/// subsets. Returns, for each row, its column. Ties keep the assignment
/// whose column sequence is lexicographically smallest.
fn min_cost_matching(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let full = (1usize << n) - 1;
    // best[mask]: minimal cost of matching rows popcount(mask)..n given that
    // the columns in mask are already used
    let mut best = vec![f64::INFINITY; 1 << n];
    best[full] = 0.0;
    for mask in (0..full).rev() {
        let row = mask.count_ones() as usize;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                let c = cost[row][col] + best[mask | (1 << col)];
                if c < best[mask] {
                    best[mask] = c;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    let mut mask = 0usize;
    for row in cost.iter().take(n) {
        let col = (0..n)
            .filter(|&c| mask & (1 << c) == 0)
            .find(|&c| row[c] + best[mask | (1 << c)] <= best[mask])
            .expect("optimal column exists");
        out.push(col);
        mask |= 1 << col;
    }
    out
}

/// Plot-ready histogram: one row per threshold pair.
///
/// ```text
/// delta_t_m,delta_theta_deg,correct,total
/// 0.01,5,3,4
/// ```
pub fn histogram_csv(report: &EvalReport) -> String {
    let mut s = String::from("delta_t_m,delta_theta_deg,correct,total\n");
    for (i, dt) in report.thresholds.translation.iter().enumerate() {
        for (j, dy) in report.thresholds.yaw.iter().enumerate() {
            let _ = writeln!(
                s,
                "{dt},{},{},{}",
                dy.to_degrees(),
                report.correct[i][j],
                report.total
            );
        }
    }
    s
}

//! Explanation cost: how many observed points the rendered scene fails to
//! explain, plus how many rendered points the observation fails to explain.
//!
//! A point is *unexplained* by a cloud when its nearest neighbor there is
//! farther than `delta`. All costs are exact integer counts.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    point_in_volume, Point3, PointCloud, RigidPose2D, SpatialIndex, VolumeApprox,
};

/// Default sensor-noise threshold, meters.
pub const DEFAULT_DELTA: f64 = 0.003;

/// Cost of one edge of the scene generation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Newly visible rendered points not explained by the observation.
    pub delta_rendered: u64,
    /// Observed points inside the new object's volume not explained by its
    /// visible points.
    pub delta_observed: u64,
    /// Observed points outside every volume not explained by the full
    /// rendering; non-zero only on edges that complete the assignment.
    pub residual: u64,
}

impl CostBreakdown {
    pub fn total(&self) -> u64 {
        self.delta_rendered + self.delta_observed + self.residual
    }
}

/// Number of `targets` with no indexed point within `delta`.
pub fn count_unexplained(targets: &[Point3], by: &SpatialIndex, delta: f64) -> u64 {
    if by.is_empty() {
        return targets.len() as u64;
    }
    targets
        .iter()
        .filter(|p| !by.nearest_within(p, delta))
        .count() as u64
}

/// Two-sided explanation cost between an observed and a rendered cloud.
pub fn explanation_cost(observed: &PointCloud, rendered: &PointCloud, delta: f64) -> u64 {
    let obs_index = SpatialIndex::new(observed);
    let ren_index = SpatialIndex::new(rendered);
    explanation_cost_indexed(
        observed.points(),
        &obs_index,
        rendered.points(),
        &ren_index,
        delta,
    )
}

/// [`explanation_cost`] with prebuilt indices.
pub fn explanation_cost_indexed(
    observed: &[Point3],
    observed_index: &SpatialIndex,
    rendered: &[Point3],
    rendered_index: &SpatialIndex,
    delta: f64,
) -> u64 {
    count_unexplained(observed, rendered_index, delta)
        + count_unexplained(rendered, observed_index, delta)
}

/// Rendered-side edge cost over the points a new object adds to the image.
pub fn delta_rendered_cost(
    new_points: &[Point3],
    observed_index: &SpatialIndex,
    delta: f64,
) -> u64 {
    count_unexplained(new_points, observed_index, delta)
}

/// Observed points inside the posed volume that the new object's visible
/// points do not explain.
pub fn delta_observed_cost(
    observed: &[Point3],
    vol: &VolumeApprox,
    pose: &RigidPose2D,
    new_points_index: &SpatialIndex,
    delta: f64,
) -> u64 {
    observed
        .iter()
        .filter(|p| point_in_volume(p, vol, pose) && !new_points_index.nearest_within(p, delta))
        .count() as u64
}

/// Observed points outside all volumes that the full rendering does not explain.
pub fn residual_cost(
    observed: &[Point3],
    volumes: &[(VolumeApprox, RigidPose2D)],
    full_rendered_index: &SpatialIndex,
    delta: f64,
) -> u64 {
    observed
        .iter()
        .filter(|p| {
            !volumes.iter().any(|(v, pose)| point_in_volume(p, v, pose))
                && !full_rendered_index.nearest_within(p, delta)
        })
        .count() as u64
}

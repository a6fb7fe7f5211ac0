//! The monotone scene generation tree.
//!
//! A state is an ordered partial assignment of object poses. A successor adds
//! one object at a grid pose such that nothing already rendered becomes
//! hidden; its edge cost is the object's share of the explanation cost, with
//! the residual for points outside every object volume charged on the edge
//! that completes the assignment. Summed along a path this reproduces the
//! full explanation cost of the goal scene whenever the objects' volumes are
//! disjoint and farther than `delta` from each other's surfaces. Placements
//! whose volume intersects an already-placed one are infeasible unless the
//! task allows interpenetration.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::align::{icp_refine, icp_refine_with_normals, IcpConfig};
use crate::cost::{
    count_unexplained, delta_observed_cost, explanation_cost_indexed, residual_cost, CostBreakdown,
    DEFAULT_DELTA,
};
use crate::error::{Error, Result};
use crate::geometry::{
    estimate_normals, inscribed_cylinder, point_in_volume, shortest_angular_difference,
    volumes_intersect, CameraModel, Point3, PointCloud, RigidPose2D, SpatialIndex, TriMesh,
    VolumeApprox,
};
use crate::render::{
    depth_to_cloud, render_depth, DepthImage, DepthRegion, DEFAULT_EPS_RENDER, NO_RETURN,
};

/// Quantum used for duplicate detection, meters and radians.
pub const KEY_QUANTUM: f64 = 1e-4;

/// Render-and-refine rounds of ICP per candidate.
const ICP_ROUNDS: usize = 4;
const NORMAL_RADIUS: f64 = 0.01;
const NORMAL_MIN_NEIGHBORS: usize = 5;

/// A known object: mesh, volume approximation and symmetry flag.
#[derive(Debug, Clone)]
pub struct ObjectModel {
    pub id: String,
    pub mesh: TriMesh,
    pub volume: VolumeApprox,
    pub rotationally_symmetric: bool,
}

impl ObjectModel {
    /// Model whose volume is the mesh's inscribed cylinder.
    pub fn new(id: impl Into<String>, mesh: TriMesh, rotationally_symmetric: bool) -> Result<Self> {
        let volume = inscribed_cylinder(&mesh)?;
        Ok(Self::with_volume(id, mesh, volume, rotationally_symmetric))
    }

    pub fn with_volume(
        id: impl Into<String>,
        mesh: TriMesh,
        volume: VolumeApprox,
        rotationally_symmetric: bool,
    ) -> Self {
        Self {
            id: id.into(),
            mesh,
            volume,
            rotationally_symmetric,
        }
    }
}

/// One object placed in the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectPoseHypothesis {
    pub model_id: String,
    pub pose: RigidPose2D,
}

impl ObjectPoseHypothesis {
    pub fn new(model_id: impl Into<String>, pose: RigidPose2D) -> Self {
        Self {
            model_id: model_id.into(),
            pose,
        }
    }
}

/// Discretization of the pose space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xy_step: f64,
    pub yaw_step: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridSpec {
    /// Default spacing: 4 cm and 22.5°.
    pub const DEFAULT_XY_STEP: f64 = 0.04;
    pub const DEFAULT_YAW_STEP: f64 = std::f64::consts::PI / 8.0;

    pub fn new(xy_step: f64, yaw_step: f64, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        let g = Self {
            xy_step,
            yaw_step,
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid covering a cloud's footprint inflated by one step, with nodes on
    /// integer multiples of `xy_step`.
    pub fn covering(cloud: &PointCloud, xy_step: f64, yaw_step: f64) -> Result<Self> {
        let (lo, hi) = cloud.bounds().ok_or_else(|| {
            Error::InvalidConfig("cannot derive grid bounds from an empty cloud".into())
        })?;
        if !(xy_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "grid step must be positive, got {xy_step}"
            )));
        }
        let snap_lo = |v: f64| ((v - xy_step) / xy_step).floor() * xy_step;
        let snap_hi = |v: f64| ((v + xy_step) / xy_step).ceil() * xy_step;
        Self::new(
            xy_step,
            yaw_step,
            (snap_lo(lo.x), snap_hi(hi.x)),
            (snap_lo(lo.y), snap_hi(hi.y)),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.xy_step,
            self.yaw_step,
            self.x_min,
            self.x_max,
            self.y_min,
            self.y_max,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || !(self.xy_step > 0.0) || !(self.yaw_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "grid steps must be positive: {self:?}"
            )));
        }
        if self.x_max < self.x_min || self.y_max < self.y_min {
            return Err(Error::InvalidConfig(format!(
                "grid bounds are empty: {self:?}"
            )));
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| lo + i as f64 * step).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.xy_step)
    }

    pub fn ys(&self) -> Vec<f64> {
        Self::axis(self.y_min, self.y_max, self.xy_step)
    }

    /// Yaw samples; a single zero yaw for rotationally symmetric objects.
    pub fn yaws(&self, rotationally_symmetric: bool) -> Vec<f64> {
        if rotationally_symmetric {
            return vec![0.0];
        }
        let n = ((TAU / self.yaw_step).round() as usize).max(1);
        (0..n).map(|k| k as f64 * self.yaw_step).collect()
    }

    /// All grid poses for one object, ordered by x, then y, then yaw.
    pub fn poses(&self, rotationally_symmetric: bool) -> Vec<RigidPose2D> {
        let yaws = self.yaws(rotationally_symmetric);
        let ys = self.ys();
        let mut out = Vec::new();
        for &x in &self.xs() {
            for &y in &ys {
                for &t in &yaws {
                    out.push(RigidPose2D::new(x, y, t));
                }
            }
        }
        out
    }
}

/// Everything the search needs to know about one scene.
#[derive(Debug, Clone)]
pub struct SceneTask {
    pub observed: Arc<PointCloud>,
    pub observed_index: Arc<SpatialIndex>,
    pub camera: CameraModel,
    pub models: BTreeMap<String, Arc<ObjectModel>>,
    /// Multiset of model ids present in the scene; its size is K.
    pub required: Vec<String>,
    pub grid: GridSpec,
    pub delta: f64,
    /// `None` disables ICP refinement.
    pub icp: Option<IcpConfig>,
    pub eps_render: f64,
    /// Admit placements whose volumes intersect those of placed objects.
    pub allow_interpenetration: bool,
    normals: Arc<OnceLock<Vec<Option<Vector3<f64>>>>>,
}

impl SceneTask {
    /// Surface normals of the observed points, estimated on first use.
    pub fn observed_normals(&self) -> &[Option<Vector3<f64>>] {
        self.normals.get_or_init(|| {
            estimate_normals(&self.observed_index, NORMAL_RADIUS, NORMAL_MIN_NEIGHBORS)
        })
    }

    /// Task with default `delta`, occlusion tolerance and ICP tied to the grid step.
    pub fn new(
        observed: PointCloud,
        camera: CameraModel,
        models: impl IntoIterator<Item = ObjectModel>,
        required: Vec<String>,
        grid: GridSpec,
    ) -> Result<Self> {
        let mut library = BTreeMap::new();
        for m in models {
            let id = m.id.clone();
            if library.insert(id.clone(), Arc::new(m)).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate model id {id:?}")));
            }
        }
        let observed_index = Arc::new(SpatialIndex::new(&observed));
        let task = Self {
            observed: Arc::new(observed),
            observed_index,
            camera,
            models: library,
            required,
            icp: Some(IcpConfig::for_grid_step(grid.xy_step)),
            grid,
            delta: DEFAULT_DELTA,
            eps_render: DEFAULT_EPS_RENDER,
            allow_interpenetration: false,
            normals: Arc::default(),
        };
        task.validate()?;
        Ok(task)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_icp(mut self, icp: Option<IcpConfig>) -> Self {
        self.icp = icp;
        self
    }

    pub fn with_eps_render(mut self, eps: f64) -> Self {
        self.eps_render = eps;
        self
    }

    pub fn with_interpenetration(mut self, allow: bool) -> Self {
        self.allow_interpenetration = allow;
        self
    }

    /// Whether no two assigned volumes intersect (always true when
    /// interpenetration is allowed).
    pub fn is_feasible(&self, assignments: &[ObjectPoseHypothesis]) -> bool {
        if self.allow_interpenetration {
            return true;
        }
        let placed: Vec<(&VolumeApprox, &RigidPose2D)> = assignments
            .iter()
            .map(|a| (&self.model(&a.model_id).volume, &a.pose))
            .collect();
        placed.iter().enumerate().all(|(i, (va, pa))| {
            placed[i + 1..]
                .iter()
                .all(|(vb, pb)| !volumes_intersect(va, pa, vb, pb))
        })
    }

    fn fits_beside(
        &self,
        volumes: &[(VolumeApprox, RigidPose2D)],
        volume: &VolumeApprox,
        pose: &RigidPose2D,
    ) -> bool {
        self.allow_interpenetration
            || volumes
                .iter()
                .all(|(v, p)| !volumes_intersect(v, p, volume, pose))
    }

    pub fn validate(&self) -> Result<()> {
        if self.required.is_empty() {
            return Err(Error::InvalidConfig(
                "scene must contain at least one object (K >= 1)".into(),
            ));
        }
        for id in &self.required {
            if !self.models.contains_key(id) {
                return Err(Error::InvalidConfig(format!(
                    "required object {id:?} has no model"
                )));
            }
        }
        self.grid.validate()?;
        if !(self.delta >= 0.0) || !(self.eps_render >= 0.0) {
            return Err(Error::InvalidConfig(
                "delta and eps_render must be non-negative".into(),
            ));
        }
        if let Some(icp) = &self.icp {
            icp.validate()?;
        }
        Ok(())
    }

    /// Number of objects to place.
    pub fn k(&self) -> usize {
        self.required.len()
    }

    pub fn model(&self, id: &str) -> &ObjectModel {
        &self.models[id]
    }

    /// Monolithic rendering of a set of placed objects.
    pub fn render(&self, assignments: &[ObjectPoseHypothesis]) -> DepthImage {
        let scene: Vec<(&TriMesh, RigidPose2D)> = assignments
            .iter()
            .map(|a| (&self.model(&a.model_id).mesh, a.pose))
            .collect();
        render_depth(&scene, &self.camera)
    }

    /// Explanation cost of a complete scene rendered in one pass.
    pub fn assignment_cost(&self, assignments: &[ObjectPoseHypothesis]) -> u64 {
        let rendered = depth_to_cloud(&self.render(assignments));
        let index = SpatialIndex::new(&rendered);
        explanation_cost_indexed(
            self.observed.points(),
            &self.observed_index,
            rendered.points(),
            &index,
            self.delta,
        )
    }

    /// Observed points outside the union of the assigned volumes.
    pub fn points_outside(&self, assignments: &[ObjectPoseHypothesis]) -> u64 {
        let vols: Vec<(VolumeApprox, RigidPose2D)> = assignments
            .iter()
            .map(|a| (self.model(&a.model_id).volume, a.pose))
            .collect();
        self.observed
            .points()
            .iter()
            .filter(|p| !vols.iter().any(|(v, pose)| point_in_volume(p, v, pose)))
            .count() as u64
    }

    /// Models still to be placed given what is already assigned, one entry
    /// per distinct id.
    pub fn remaining_ids(&self, assignments: &[ObjectPoseHypothesis]) -> Vec<String> {
        let mut left: BTreeMap<&str, usize> = BTreeMap::new();
        for id in &self.required {
            *left.entry(id.as_str()).or_default() += 1;
        }
        for a in assignments {
            if let Some(n) = left.get_mut(a.model_id.as_str()) {
                *n = n.saturating_sub(1);
            }
        }
        left.into_iter()
            .filter(|&(_, n)| n > 0)
            .map(|(id, _)| id.to_string())
            .collect()
    }

    fn canonical_key(&self, assignments: &[ObjectPoseHypothesis]) -> CanonicalKey {
        let mut entries: Vec<KeyEntry> = assignments
            .iter()
            .map(|a| {
                let symmetric = self.model(&a.model_id).rotationally_symmetric;
                let theta = if symmetric {
                    0
                } else {
                    // wrap so that 2π - ε and 0 share a bucket
                    let q = (a.pose.theta / KEY_QUANTUM).round() as i64;
                    q.rem_euclid((TAU / KEY_QUANTUM).round() as i64)
                };
                KeyEntry {
                    model_id: a.model_id.clone(),
                    x: (a.pose.x / KEY_QUANTUM).round() as i64,
                    y: (a.pose.y / KEY_QUANTUM).round() as i64,
                    theta,
                }
            })
            .collect();
        entries.sort();
        CanonicalKey(entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
struct KeyEntry {
    model_id: String,
    x: i64,
    y: i64,
    theta: i64,
}

/// Order-independent identity of an assignment set, with poses quantized to
/// [`KEY_QUANTUM`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(Vec<KeyEntry>);

/// A node of the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneState {
    assignments: Vec<ObjectPoseHypothesis>,
    g: u64,
    cloud_size: usize,
    outside_volumes: u64,
    key: CanonicalKey,
}

impl SceneState {
    /// The empty scene.
    pub fn root(task: &SceneTask) -> Self {
        Self {
            assignments: Vec::new(),
            g: 0,
            cloud_size: 0,
            outside_volumes: task.observed.len() as u64,
            key: CanonicalKey(Vec::new()),
        }
    }

    pub fn assignments(&self) -> &[ObjectPoseHypothesis] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Accumulated edge cost from the root.
    pub fn g(&self) -> u64 {
        self.g
    }

    /// Number of rendered pixels with a return.
    pub fn cloud_size(&self) -> usize {
        self.cloud_size
    }

    /// Observed points outside the union of assigned volumes.
    pub fn outside_volumes(&self) -> u64 {
        self.outside_volumes
    }

    pub fn canonical_key(&self) -> &CanonicalKey {
        &self.key
    }

    /// Rebuilds this state's depth image by adding objects in assignment
    /// order, each filling only pixels that are still empty. This is the
    /// image successor generation works from.
    pub fn render(&self, task: &SceneTask) -> DepthImage {
        let mut img = DepthImage::empty(&task.camera);
        for a in &self.assignments {
            let region = DepthRegion::render(&task.model(&a.model_id).mesh, &a.pose, &task.camera);
            fill_empty(&mut img, &region);
        }
        img
    }
}

fn fill_empty(img: &mut DepthImage, region: &DepthRegion) {
    let width = img.width();
    for (pixel, d) in region.returns(width) {
        if !img.has_return(pixel) {
            img.set(pixel, d);
        }
    }
}

/// True iff the state assigns every required object.
pub fn is_goal(s: &SceneState, task: &SceneTask) -> bool {
    s.len() == task.k()
}

/// Total cost of a goal state.
pub fn path_cost(goal: &SceneState, task: &SceneTask) -> Result<u64> {
    if !is_goal(goal, task) {
        return Err(Error::NotGoal {
            assigned: goal.len(),
            required: task.k(),
        });
    }
    Ok(goal.g)
}

/// Per-expansion data shared by every candidate of one parent.
struct ParentContext<'a> {
    state: &'a SceneState,
    depth: DepthImage,
    cloud: Vec<Point3>,
    volumes: Vec<(VolumeApprox, RigidPose2D)>,
    in_union: Vec<bool>,
}

impl<'a> ParentContext<'a> {
    fn new(state: &'a SceneState, task: &SceneTask) -> Self {
        let depth = state.render(task);
        let cloud = depth_to_cloud(&depth).into_points();
        let volumes: Vec<(VolumeApprox, RigidPose2D)> = state
            .assignments
            .iter()
            .map(|a| (task.model(&a.model_id).volume, a.pose))
            .collect();
        let in_union = task
            .observed
            .points()
            .iter()
            .map(|p| volumes.iter().any(|(v, pose)| point_in_volume(p, v, pose)))
            .collect();
        Self {
            state,
            depth,
            cloud,
            volumes,
            in_union,
        }
    }
}

/// A rendered candidate with the pixels it newly contributes.
struct Placement {
    pose: RigidPose2D,
    visible: Vec<(usize, f64)>,
}

impl Placement {
    /// Renders `model` at `pose` over the parent; `None` if it would hide
    /// any parent surface.
    fn try_new(
        model: &ObjectModel,
        pose: RigidPose2D,
        parent: &ParentContext,
        task: &SceneTask,
    ) -> Option<Self> {
        let region = DepthRegion::render(&model.mesh, &pose, &task.camera);
        let mut visible = Vec::new();
        for (pixel, d) in region.returns(parent.depth.width()) {
            let p = parent.depth.depths()[pixel];
            if p == NO_RETURN {
                visible.push((pixel, d));
            } else if d < p - task.eps_render {
                return None;
            }
        }
        Some(Self { pose, visible })
    }

    fn points(&self, depth: &DepthImage) -> Vec<Point3> {
        let cam = depth.camera();
        let w = depth.width();
        self.visible
            .iter()
            .map(|&(pixel, d)| cam.back_project((pixel % w) as f64, (pixel / w) as f64, d))
            .collect()
    }
}

/// Generates every monotone child of `s`, with its edge cost.
///
/// Candidates are the grid poses of each distinct remaining model id (yaw
/// fixed for symmetric models). A candidate is dropped if it hides any
/// already-rendered pixel, before or after ICP refinement, or if its volume
/// intersects a placed one; ICP stops short of such a pose. Output is sorted
/// by `(model_id, x, y, yaw)` of the added object, and later entries whose
/// canonical key repeats an earlier one are dropped. Candidate evaluation
/// runs on the current rayon pool; the result does not depend on its size.
pub fn successors(s: &SceneState, task: &SceneTask) -> Vec<(SceneState, CostBreakdown)> {
    if s.len() >= task.k() {
        return Vec::new();
    }
    let parent = ParentContext::new(s, task);
    let mut candidates: Vec<(&ObjectModel, RigidPose2D)> = Vec::new();
    for id in task.remaining_ids(&s.assignments) {
        let model = task.model(&id);
        for pose in task.grid.poses(model.rotationally_symmetric) {
            candidates.push((model, pose));
        }
    }

    let mut children: Vec<(SceneState, CostBreakdown)> = candidates
        .par_iter()
        .filter_map(|&(model, seed)| expand_candidate(&parent, model, seed, task))
        .collect();

    children.sort_by(|(a, _), (b, _)| {
        let (ha, hb) = (a.assignments.last().unwrap(), b.assignments.last().unwrap());
        ha.model_id
            .cmp(&hb.model_id)
            .then(ha.pose.x.total_cmp(&hb.pose.x))
            .then(ha.pose.y.total_cmp(&hb.pose.y))
            .then(ha.pose.theta.total_cmp(&hb.pose.theta))
    });
    let mut seen = BTreeSet::new();
    children.retain(|(c, _)| seen.insert(c.key.clone()));
    children
}

fn expand_candidate(
    parent: &ParentContext,
    model: &ObjectModel,
    seed: RigidPose2D,
    task: &SceneTask,
) -> Option<(SceneState, CostBreakdown)> {
    if !task.fits_beside(&parent.volumes, &model.volume, &seed) {
        return None;
    }
    let mut placement = Placement::try_new(model, seed, parent, task)?;

    if let Some(icp) = &task.icp {
        let cfg = IcpConfig {
            estimate_yaw: icp.estimate_yaw && !model.rotationally_symmetric,
            ..*icp
        };
        // the visible surface changes with the pose, so re-render and refine again
        for _ in 0..ICP_ROUNDS {
            if placement.visible.is_empty() {
                break;
            }
            let source = placement.points(&parent.depth);
            let refined = if cfg.point_to_plane {
                icp_refine_with_normals(
                    &source,
                    &task.observed_index,
                    task.observed_normals(),
                    placement.pose,
                    &cfg,
                )
            } else {
                icp_refine(&source, &task.observed_index, placement.pose, &cfg)
            };
            let Ok(result) = refined else {
                break;
            };
            let refined = result.refined_pose;
            if result.iterations == 0
                || !within_cell(&seed, &refined, &task.grid, model.rotationally_symmetric)
                || !task.fits_beside(&parent.volumes, &model.volume, &refined)
            {
                break;
            }
            let moved = (refined.x - placement.pose.x).hypot(refined.y - placement.pose.y)
                + shortest_angular_difference(refined.theta, placement.pose.theta)
                    * model.mesh.footprint_radius();
            placement = Placement::try_new(model, refined, parent, task)?;
            if moved < KEY_QUANTUM {
                break;
            }
        }
    }

    let new_points = placement.points(&parent.depth);
    let new_index = SpatialIndex::from_points(new_points.clone());
    let delta = task.delta;
    let observed = task.observed.points();

    let delta_rendered = count_unexplained(&new_points, &task.observed_index, delta);
    let delta_observed =
        delta_observed_cost(observed, &model.volume, &placement.pose, &new_index, delta);

    let mut assignments = parent.state.assignments.clone();
    assignments.push(ObjectPoseHypothesis::new(model.id.clone(), placement.pose));

    let residual = if assignments.len() == task.k() {
        let mut full = parent.cloud.clone();
        full.extend_from_slice(&new_points);
        let full_index = SpatialIndex::from_points(full);
        let mut volumes = parent.volumes.clone();
        volumes.push((model.volume, placement.pose));
        residual_cost(observed, &volumes, &full_index, delta)
    } else {
        0
    };

    let cost = CostBreakdown {
        delta_rendered,
        delta_observed,
        residual,
    };
    let newly_covered = observed
        .iter()
        .zip(&parent.in_union)
        .filter(|(p, &inside)| !inside && point_in_volume(p, &model.volume, &placement.pose))
        .count() as u64;

    let key = task.canonical_key(&assignments);
    let child = SceneState {
        g: parent.state.g + cost.total(),
        cloud_size: parent.state.cloud_size + placement.visible.len(),
        outside_volumes: parent.state.outside_volumes - newly_covered,
        assignments,
        key,
    };
    Some((child, cost))
}

/// ICP may move a hypothesis at most half a grid cell from its seed.
fn within_cell(
    seed: &RigidPose2D,
    refined: &RigidPose2D,
    grid: &GridSpec,
    symmetric: bool,
) -> bool {
    let half = grid.xy_step / 2.0 + 1e-12;
    (refined.x - seed.x).abs() <= half
        && (refined.y - seed.y).abs() <= half
        && (symmetric
            || shortest_angular_difference(refined.theta, seed.theta)
                <= grid.yaw_step / 2.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_axes() {
        let g = GridSpec::new(0.04, std::f64::consts::PI / 8.0, (0.0, 0.08), (-0.04, 0.0)).unwrap();
        assert_eq!(g.xs().len(), 3);
        assert_eq!(g.ys().len(), 2);
        assert_eq!(g.yaws(false).len(), 16);
        assert_eq!(g.yaws(true), vec![0.0]);
        assert_eq!(g.poses(false).len(), 96);
        assert!(GridSpec::new(0.0, 0.1, (0.0, 1.0), (0.0, 1.0)).is_err());
        assert!(GridSpec::new(0.1, 0.1, (1.0, 0.0), (0.0, 1.0)).is_err());
    }

    #[test]
    fn covering_grid_snaps_to_lattice() {
        let cloud = PointCloud::world(vec![
            Point3::new(0.01, -0.05, 0.0),
            Point3::new(0.13, 0.02, 0.1),
        ])
        .unwrap();
        let g = GridSpec::covering(&cloud, 0.04, 0.3).unwrap();
        assert!((g.x_min - -0.04).abs() < 1e-12);
        assert!((g.x_max - 0.20).abs() < 1e-12);
        assert!((g.y_min - -0.12).abs() < 1e-12);
        assert!((g.y_max - 0.08).abs() < 1e-12);
    }

    #[test]
    fn within_cell_bounds() {
        let g = GridSpec::new(0.04, 0.4, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let seed = RigidPose2D::new(0.1, 0.1, 0.1);
        assert!(within_cell(
            &seed,
            &RigidPose2D::new(0.119, 0.081, 0.29),
            &g,
            false
        ));
        assert!(!within_cell(
            &seed,
            &RigidPose2D::new(0.121, 0.1, 0.1),
            &g,
            false
        ));
        assert!(!within_cell(
            &seed,
            &RigidPose2D::new(0.1, 0.1, 0.31),
            &g,
            false
        ));
        assert!(within_cell(
            &seed,
            &RigidPose2D::new(0.1, 0.1, 3.0),
            &g,
            true
        ));
    }
}

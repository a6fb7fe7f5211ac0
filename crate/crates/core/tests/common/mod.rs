//! Shared fixtures for the integration tests: an independent ray caster,
//! scenario generators and an observer that audits every search edge.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scenesearch_core::cost::CostBreakdown;
use scenesearch_core::geometry::{
    shortest_angular_difference, CameraModel, Point3, RigidPose2D, TriMesh,
};
use scenesearch_core::harness::{
    builtin_models, default_camera, index_models, synthesize_scene, GroundTruthScene,
};
use scenesearch_core::msgt::{GridSpec, ObjectModel, ObjectPoseHypothesis, SceneState, SceneTask};
use scenesearch_core::render::{persists, NO_RETURN};
use scenesearch_core::search::{h_depth, h_overlap, Heuristic, SearchObserver, SearchStats};

pub const DELTA: f64 = 0.003;
pub const EPS_DEPTH: f64 = 1e-4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn models() -> Vec<ObjectModel> {
    builtin_models()
}

pub fn library() -> BTreeMap<String, ObjectModel> {
    index_models(&models())
}

// ---------------------------------------------------------------------------
// Reference ray caster
// ---------------------------------------------------------------------------

/// Depth along the optical axis of the closest hit of the ray through pixel
/// `(u, v)`, by brute-force Moller-Trumbore against every triangle. Hits
/// closer than 1 mm to the camera plane are ignored, like the near plane of
/// the rasterizer.
pub fn ray_cast(scene: &[(&TriMesh, RigidPose2D)], camera: &CameraModel) -> Vec<f64> {
    let w2c = camera.world_to_camera();
    let mut tris: Vec<[nalgebra::Vector3<f64>; 3]> = Vec::new();
    for (mesh, pose) in scene {
        for t in mesh.triangles() {
            let corner = |i: u32| (w2c * pose.apply(&mesh.vertices()[i as usize])).coords;
            tris.push([corner(t[0]), corner(t[1]), corner(t[2])]);
        }
    }
    let mut out = vec![NO_RETURN; camera.width * camera.height];
    for v in 0..camera.height {
        for u in 0..camera.width {
            let dir = nalgebra::Vector3::new(
                (u as f64 - camera.cx) / camera.fx,
                (v as f64 - camera.cy) / camera.fy,
                1.0,
            );
            let mut best = NO_RETURN;
            for [a, b, c] in &tris {
                let e1 = b - a;
                let e2 = c - a;
                let pv = dir.cross(&e2);
                let det = e1.dot(&pv);
                if det.abs() < 1e-15 {
                    continue;
                }
                let inv = 1.0 / det;
                let s = -a;
                let bu = s.dot(&pv) * inv;
                if !(-1e-12..=1.0 + 1e-12).contains(&bu) {
                    continue;
                }
                let q = s.cross(&e1);
                let bv = dir.dot(&q) * inv;
                if bv < -1e-12 || bu + bv > 1.0 + 1e-12 {
                    continue;
                }
                let t = e2.dot(&q) * inv;
                // dir.z == 1, so the ray parameter is the depth
                if t > 1e-3 && t < best {
                    best = t;
                }
            }
            out[v * camera.width + u] = best;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Scenario generators
// ---------------------------------------------------------------------------

/// Models whose volumes stay more than `DELTA` from the other models'
/// surfaces at 8 cm center spacing.
pub const COMPACT_IDS: [&str; 4] = ["box", "cylinder", "step_block", "tall_box"];

/// Two placed objects are separated when each one's volume is farther than
/// `DELTA` (horizontally) from the disc that bounds the other's footprint,
/// and so from every point of its surface.
pub fn separated(
    lib: &BTreeMap<String, ObjectModel>,
    a: &ObjectPoseHypothesis,
    b: &ObjectPoseHypothesis,
) -> bool {
    let (ma, mb) = (&lib[&a.model_id], &lib[&b.model_id]);
    let gap = |m: &ObjectModel, p: &RigidPose2D, other: &ObjectModel, q: &RigidPose2D| {
        let (cx, cy) = m.volume.world_center(p);
        (q.x - cx).hypot(q.y - cy) - other.mesh.footprint_radius() - m.volume.radius
    };
    gap(ma, &a.pose, mb, &b.pose) > DELTA && gap(mb, &b.pose, ma, &a.pose) > DELTA
}

fn random_ids(r: &mut ChaCha8Rng, k: usize) -> Vec<String> {
    (0..k)
        .map(|_| COMPACT_IDS.choose(r).unwrap().to_string())
        .collect()
}

/// Truth near distinct cells of `cells`, offset by up to `jitter` per axis,
/// random yaw; objects pairwise separated.
fn jittered_truth(
    r: &mut ChaCha8Rng,
    lib: &BTreeMap<String, ObjectModel>,
    ids: &[String],
    cells: &[(f64, f64)],
    jitter: f64,
) -> Vec<ObjectPoseHypothesis> {
    loop {
        let mut chosen: Vec<(f64, f64)> = cells.choose_multiple(r, ids.len()).copied().collect();
        chosen.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let truth: Vec<ObjectPoseHypothesis> = ids
            .iter()
            .zip(&chosen)
            .map(|(id, (x, y))| {
                let pose = RigidPose2D::new(
                    x + r.random_range(-jitter..=jitter),
                    y + r.random_range(-jitter..=jitter),
                    r.random_range(0.0..2.0 * PI),
                );
                ObjectPoseHypothesis::new(id.clone(), pose)
            })
            .collect();
        let ok = (0..truth.len())
            .all(|i| (i + 1..truth.len()).all(|j| separated(lib, &truth[i], &truth[j])));
        if ok {
            return truth;
        }
    }
}

fn cells(grid: &GridSpec) -> Vec<(f64, f64)> {
    let ys = grid.ys();
    grid.xs()
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect()
}

pub fn task_for(scene: &GroundTruthScene, grid: GridSpec, icp: bool) -> SceneTask {
    let task = SceneTask::new(
        scene.observed.clone(),
        scene.camera.clone(),
        models(),
        scene.required_ids(),
        grid,
    )
    .unwrap()
    .with_delta(DELTA);
    if icp {
        task
    } else {
        task.with_icp(None)
    }
}

/// Decomposition scenes: K in 1..=3 objects, noisy off-grid truth, a 4 x 4
/// grid with 8 cm spacing and 4 yaws, ICP off.
pub fn decomposition_task(seed: u64) -> SceneTask {
    let mut r = rng(seed);
    let lib = library();
    let grid = GridSpec::new(0.08, FRAC_PI_2, (-0.12, 0.12), (-0.12, 0.12)).unwrap();
    let k = r.random_range(1..=3);
    let ids = random_ids(&mut r, k);
    let truth = jittered_truth(&mut r, &lib, &ids, &cells(&grid), 0.02);
    let scene = synthesize_scene(&lib, &truth, &default_camera(), 0.001, seed).unwrap();
    task_for(&scene, grid, false)
}

/// Optimality tasks: K in {1, 2}, a 3 x 3 grid with 8 cm spacing and 4
/// yaws (at most 36^2 joint configurations), noisy off-grid truth, ICP off.
pub fn optimality_task(seed: u64) -> (SceneTask, Vec<ObjectPoseHypothesis>) {
    let mut r = rng(seed);
    let lib = library();
    let grid = GridSpec::new(0.08, FRAC_PI_2, (-0.08, 0.08), (-0.08, 0.08)).unwrap();
    let k = if seed % 2 == 0 { 1 } else { 2 };
    let ids = random_ids(&mut r, k);
    let truth = jittered_truth(&mut r, &lib, &ids, &cells(&grid), 0.015);
    let scene = synthesize_scene(&lib, &truth, &default_camera(), 0.001, seed).unwrap();
    (task_for(&scene, grid, false), truth)
}

/// Low camera for the occlusion scenes, so that a front object can hide
/// most of the one behind it.
pub fn occlusion_camera() -> CameraModel {
    CameraModel::look_at(
        160.0,
        160.0,
        79.5,
        59.5,
        160,
        120,
        Point3::new(0.0, -0.7, 0.2),
        Point3::new(0.0, 0.0, 0.05),
    )
    .unwrap()
}

/// Fraction of `target`'s pixels (rendered alone) hidden by the rest of the scene.
pub fn occluded_fraction(
    lib: &BTreeMap<String, ObjectModel>,
    truth: &[ObjectPoseHypothesis],
    target: usize,
    camera: &CameraModel,
) -> f64 {
    use scenesearch_core::render::render_depth;
    let all: Vec<(&TriMesh, RigidPose2D)> = truth
        .iter()
        .map(|t| (&lib[&t.model_id].mesh, t.pose))
        .collect();
    let alone = render_depth(&all[target..=target], camera);
    let joint = render_depth(&all, camera);
    let (mut own, mut hidden) = (0usize, 0usize);
    for (a, j) in alone.depths().iter().zip(joint.depths()) {
        if a.is_finite() {
            own += 1;
            if *j < a - 1e-9 {
                hidden += 1;
            }
        }
    }
    hidden as f64 / own as f64
}

/// A can in front of a stepped block, both on the 4 cm grid, with the block
/// between 50% and 80% hidden from the low camera.
pub fn occlusion_layout(seed: u64) -> Vec<ObjectPoseHypothesis> {
    let mut r = rng(seed);
    let lib = library();
    let cam = occlusion_camera();
    loop {
        let fx = 0.04 * r.random_range(-2..=2) as f64;
        let fy = 0.04 * r.random_range(-2..=0) as f64;
        let bx = fx + 0.04 * r.random_range(-1..=1) as f64;
        let by = fy + 0.04 * r.random_range(2..=3) as f64;
        let yaw = GridSpec::DEFAULT_YAW_STEP * r.random_range(0..16) as f64;
        let truth = vec![
            ObjectPoseHypothesis::new("cylinder", RigidPose2D::new(fx, fy, 0.0)),
            ObjectPoseHypothesis::new("step_block", RigidPose2D::new(bx, by, yaw)),
        ];
        if !separated(&lib, &truth[0], &truth[1]) {
            continue;
        }
        let f = occluded_fraction(&lib, &truth, 1, &cam);
        if (0.5..=0.8).contains(&f) {
            return truth;
        }
    }
}

/// One stepped block, offset from the nearest 4 cm / 22.5 degree grid pose
/// by up to half a cell on every axis.
pub fn offgrid_truth(seed: u64) -> Vec<ObjectPoseHypothesis> {
    let mut r = rng(seed);
    let half = 0.02;
    let half_yaw = GridSpec::DEFAULT_YAW_STEP / 2.0;
    let pose = RigidPose2D::new(
        0.04 * r.random_range(-1..=1) as f64 + r.random_range(-half..=half),
        0.04 * r.random_range(-1..=1) as f64 + r.random_range(-half..=half),
        GridSpec::DEFAULT_YAW_STEP * r.random_range(0..16) as f64
            + r.random_range(-half_yaw..=half_yaw),
    );
    vec![ObjectPoseHypothesis::new("step_block", pose)]
}

/// Grid at the default resolution covering the observation.
pub fn default_grid(scene: &GroundTruthScene) -> GridSpec {
    GridSpec::covering(
        &scene.observed,
        GridSpec::DEFAULT_XY_STEP,
        GridSpec::DEFAULT_YAW_STEP,
    )
    .unwrap()
}

/// Per-object (translation, yaw) errors after id-wise matching; yaw is zero
/// for symmetric models.
pub fn pose_errors(
    lib: &BTreeMap<String, ObjectModel>,
    predicted: &[ObjectPoseHypothesis],
    truth: &[ObjectPoseHypothesis],
) -> Vec<(f64, f64)> {
    let mut used = vec![false; predicted.len()];
    truth
        .iter()
        .map(|t| {
            let (i, p) = predicted
                .iter()
                .enumerate()
                .filter(|(i, p)| !used[*i] && p.model_id == t.model_id)
                .min_by(|(_, a), (_, b)| {
                    let da = (a.pose.x - t.pose.x).hypot(a.pose.y - t.pose.y);
                    let db = (b.pose.x - t.pose.x).hypot(b.pose.y - t.pose.y);
                    da.total_cmp(&db)
                })
                .expect("prediction for every truth object");
            used[i] = true;
            let dt = (p.pose.x - t.pose.x).hypot(p.pose.y - t.pose.y);
            let dy = if lib[&t.model_id].rotationally_symmetric {
                0.0
            } else {
                shortest_angular_difference(p.pose.theta, t.pose.theta)
            };
            (dt, dy)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Edge audit
// ---------------------------------------------------------------------------

/// Checks every generated edge for pixel persistence, cached heuristic
/// values against their closed forms and non-increasing overlap, and the
/// anchor minimum for monotonicity.
pub struct EdgeAudit<'a> {
    pub task: &'a SceneTask,
    pub edges: u64,
    pub persistence_violations: u64,
    pub heuristic_mismatches: u64,
    pub overlap_increases: u64,
    pub min_key_decreases: u64,
    last_min_key: Option<u64>,
    check_renders: bool,
}

impl<'a> EdgeAudit<'a> {
    pub fn new(task: &'a SceneTask) -> Self {
        Self {
            task,
            edges: 0,
            persistence_violations: 0,
            heuristic_mismatches: 0,
            overlap_increases: 0,
            min_key_decreases: 0,
            last_min_key: None,
            check_renders: true,
        }
    }

    pub fn clean(&self) -> bool {
        self.persistence_violations == 0
            && self.heuristic_mismatches == 0
            && self.overlap_increases == 0
            && self.min_key_decreases == 0
    }
}

impl SearchObserver for EdgeAudit<'_> {
    fn on_edge(&mut self, parent: &SceneState, child: &SceneState, _cost: &CostBreakdown) {
        self.edges += 1;
        let k = self.task.k();
        if self.check_renders {
            let (p, c) = (parent.render(self.task), child.render(self.task));
            if !persists(&p, &c, self.task.eps_render).unwrap() {
                self.persistence_violations += 1;
            }
        }
        let closed_overlap = h_overlap(child, self.task);
        if Heuristic::Overlap.eval(child, k) != closed_overlap
            || Heuristic::Depth.eval(child, k) != (k - child.len()) as u64
            || h_depth(child, k) != (k - child.len()) as u64
        {
            self.heuristic_mismatches += 1;
        }
        if closed_overlap > h_overlap(parent, self.task) {
            self.overlap_increases += 1;
        }
    }

    fn on_progress(&mut self, stats: &SearchStats) {
        if let (Some(prev), Some(now)) = (self.last_min_key, stats.min_key) {
            if now < prev {
                self.min_key_decreases += 1;
            }
        }
        if stats.min_key.is_some() {
            self.last_min_key = stats.min_key;
        }
    }
}

//! Planar ICP used to pull coarse grid hypotheses onto the observation.
//!
//! With target normals available the residual is point-to-plane plus a
//! lightly weighted point-to-point term; without them it is point-to-point.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, RigidPose2D, SpatialIndex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcpConfig {
    /// Correspondences farther apart than this are ignored, meters.
    pub max_correspondence: f64,
    pub max_iterations: usize,
    /// Stop once an iteration lowers the RMS residual by less than this, meters.
    pub convergence_eps: f64,
    /// Solve for yaw as well as translation. Off for rotationally symmetric objects.
    pub estimate_yaw: bool,
    /// Source clouds larger than this are subsampled with a fixed stride.
    pub max_source_points: usize,
    /// Search-time switch: refine with target normals for a point-to-plane residual.
    pub point_to_plane: bool,
    /// Weight of the point-to-point term added to each point-to-plane pair.
    pub point_weight: f64,
}

impl Default for IcpConfig {
    fn default() -> Self {
        Self {
            max_correspondence: 0.02,
            max_iterations: 30,
            convergence_eps: 1e-6,
            estimate_yaw: true,
            max_source_points: 400,
            point_to_plane: false,
            point_weight: 0.05,
        }
    }
}

impl IcpConfig {
    /// Search defaults: correspondence cap tied to half the grid step, point-to-plane residual.
    pub fn for_grid_step(xy_step: f64) -> Self {
        Self {
            max_correspondence: xy_step / 2.0,
            point_to_plane: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_correspondence > 0.0)
            || self.max_iterations == 0
            || self.max_source_points == 0
            || !(self.point_weight >= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "ICP needs a positive correspondence cap and iteration/point limits, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IcpResult {
    pub refined_pose: RigidPose2D,
    /// RMS alignment residual over matched pairs at the refined pose, meters.
    pub fitness: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Fitness after each accepted iteration; non-increasing.
    pub history: Vec<f64>,
}

/// Refines `initial` so that `source` (points rendered at `initial`, world
/// frame) lines up with the indexed target. Only x, y and yaw change.
///
/// Each iteration matches source points to their nearest target within
/// `max_correspondence`, solves the planar rigid alignment of those pairs in
/// closed form and applies it. Refinement stops when fresh correspondences
/// would raise the residual above the last accepted value.
pub fn icp_refine(
    source: &[Point3],
    target: &SpatialIndex,
    initial: RigidPose2D,
    cfg: &IcpConfig,
) -> Result<IcpResult> {
    refine(source, target, None, initial, cfg)
}

/// Point-to-plane variant of [`icp_refine`]. `target_normals` runs parallel
/// to the index points; pairs whose target has no normal use the
/// point-to-point residual. Each step is one Gauss-Newton update.
pub fn icp_refine_with_normals(
    source: &[Point3],
    target: &SpatialIndex,
    target_normals: &[Option<Vector3<f64>>],
    initial: RigidPose2D,
    cfg: &IcpConfig,
) -> Result<IcpResult> {
    refine(source, target, Some(target_normals), initial, cfg)
}

fn refine(
    source: &[Point3],
    target: &SpatialIndex,
    target_normals: Option<&[Option<Vector3<f64>>]>,
    initial: RigidPose2D,
    cfg: &IcpConfig,
) -> Result<IcpResult> {
    cfg.validate()?;
    if source.is_empty() {
        return Err(Error::InvalidGeometry("ICP source cloud is empty".into()));
    }
    if let Some(normals) = target_normals {
        if normals.len() != target.len() {
            return Err(Error::InvalidGeometry(format!(
                "{} target normals for {} target points",
                normals.len(),
                target.len()
            )));
        }
    }
    let normals = target_normals;
    let stride = source.len().div_ceil(cfg.max_source_points);
    let source: Vec<Point3> = source.iter().step_by(stride).copied().collect();

    let mut delta = RigidPose2D::identity();
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut pairs: Vec<Pair> = Vec::with_capacity(source.len());

    for _ in 0..cfg.max_iterations {
        pairs.clear();
        for s in &source {
            let moved = delta.apply(s);
            if let Some((j, _)) = target.nearest_in_radius(&moved, cfg.max_correspondence) {
                let normal = normals.and_then(|n| n[j]);
                pairs.push((moved, target.points()[j], normal));
            }
        }
        if pairs.is_empty() {
            if history.is_empty() {
                return Ok(IcpResult {
                    refined_pose: initial,
                    fitness: 0.0,
                    iterations: 0,
                    converged: false,
                    history,
                });
            }
            converged = true;
            break;
        }
        let before = residual(&pairs, &RigidPose2D::identity(), cfg.point_weight);
        if history.last().is_some_and(|&last| before > last) {
            converged = true;
            break;
        }
        let step = if pairs.iter().any(|p| p.2.is_some()) {
            solve_point_to_plane(&pairs, cfg.estimate_yaw, cfg.point_weight)
        } else {
            let plain: Vec<(Point3, Point3)> = pairs.iter().map(|&(s, t, _)| (s, t)).collect();
            solve_planar(&plain, cfg.estimate_yaw)
        };
        let after = residual(&pairs, &step, cfg.point_weight);
        if after > before {
            // rounding noise at an optimum
            converged = true;
            break;
        }
        delta = step.compose(&delta);
        history.push(after);
        iterations += 1;
        if before - after < cfg.convergence_eps {
            converged = true;
            break;
        }
    }

    Ok(IcpResult {
        refined_pose: delta.compose(&initial),
        fitness: history.last().copied().unwrap_or(0.0),
        iterations,
        converged,
        history,
    })
}

type Pair = (Point3, Point3, Option<Vector3<f64>>);

fn residual(pairs: &[Pair], step: &RigidPose2D, point_weight: f64) -> f64 {
    let sum: f64 = pairs
        .iter()
        .map(|(s, t, n)| {
            let d = step.apply(s) - t;
            match n {
                Some(n) => d.dot(n).powi(2) + point_weight * d.norm_squared(),
                None => d.norm_squared(),
            }
        })
        .sum();
    (sum / pairs.len() as f64).sqrt()
}

/// One Gauss-Newton step on the mixed residual, linearized about the source
/// centroid and applied as an exact rotation.
fn solve_point_to_plane(pairs: &[Pair], estimate_yaw: bool, point_weight: f64) -> RigidPose2D {
    let n = pairs.len() as f64;
    let cx = pairs.iter().map(|p| p.0.x).sum::<f64>() / n;
    let cy = pairs.iter().map(|p| p.0.y).sum::<f64>() / n;
    let mut h = Matrix3::<f64>::zeros();
    let mut g = Vector3::<f64>::zeros();
    let mut add = |j: Vector3<f64>, r: f64, w: f64| {
        h += j * j.transpose() * w;
        g += j * (r * w);
    };
    for (s, t, normal) in pairs {
        let d = s - t;
        let (px, py) = (-(s.y - cy), s.x - cx);
        let point_w = match normal {
            Some(nv) => {
                add(
                    Vector3::new(nv.x, nv.y, px * nv.x + py * nv.y),
                    d.dot(nv),
                    1.0,
                );
                point_weight
            }
            None => 1.0,
        };
        add(Vector3::new(1.0, 0.0, px), d.x, point_w);
        add(Vector3::new(0.0, 1.0, py), d.y, point_w);
    }
    let (tx, ty, theta) = if estimate_yaw {
        match h.lu().solve(&-g) {
            Some(x) if x.iter().all(|v| v.is_finite()) => (x[0], x[1], x[2]),
            _ => return RigidPose2D::identity(),
        }
    } else {
        let h2 = h.fixed_view::<2, 2>(0, 0).into_owned();
        let g2 = g.fixed_rows::<2>(0).into_owned();
        match h2.lu().solve(&-g2) {
            Some(x) if x.iter().all(|v| v.is_finite()) => (x[0], x[1], 0.0),
            _ => return RigidPose2D::identity(),
        }
    };
    let (sn, cs) = theta.sin_cos();
    RigidPose2D::new(
        cx + tx - (cs * cx - sn * cy),
        cy + ty - (sn * cx + cs * cy),
        theta,
    )
}

/// Closed-form least-squares rotation about z plus xy translation mapping
/// sources onto targets.
pub(crate) fn solve_planar(pairs: &[(Point3, Point3)], estimate_yaw: bool) -> RigidPose2D {
    let n = pairs.len() as f64;
    let (mut sx, mut sy, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0);
    for (s, t) in pairs {
        sx += s.x;
        sy += s.y;
        tx += t.x;
        ty += t.y;
    }
    let (sx, sy, tx, ty) = (sx / n, sy / n, tx / n, ty / n);
    if !estimate_yaw {
        return RigidPose2D::new(tx - sx, ty - sy, 0.0);
    }
    let (mut cross, mut dot) = (0.0, 0.0);
    for (s, t) in pairs {
        let (ax, ay) = (s.x - sx, s.y - sy);
        let (bx, by) = (t.x - tx, t.y - ty);
        cross += ax * by - ay * bx;
        dot += ax * bx + ay * by;
    }
    let theta = if cross == 0.0 && dot == 0.0 {
        0.0
    } else {
        cross.atan2(dot)
    };
    let (s, c) = theta.sin_cos();
    RigidPose2D::new(tx - (c * sx - s * sy), ty - (s * sx + c * sy), theta)
}

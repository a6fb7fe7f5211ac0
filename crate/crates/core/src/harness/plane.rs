use nalgebra::{Isometry3, Matrix3, Translation3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

/// A plane must hold at least this fraction of the cloud to count as the table.
pub const MIN_INLIER_FRACTION: f64 = 0.3;

/// Outcome of [`remove_plane`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRemoval {
    /// Input minus the plane inliers, or the untouched input when no plane
    /// was accepted.
    pub filtered: PointCloud,
    /// `[a, b, c, d]` with `a x + b y + c z + d = 0`, unit normal, `c >= 0`.
    pub plane: Option<[f64; 4]>,
    pub inlier_fraction: f64,
    pub warning: Option<String>,
}

fn plane_through(a: &Point3, b: &Point3, c: &Point3) -> Option<[f64; 4]> {
    let n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len < 1e-12 {
        return None;
    }
    Some(oriented(n / len, a))
}

fn oriented(n: Vector3<f64>, on_plane: &Point3) -> [f64; 4] {
    let n = if n.z < 0.0 { -n } else { n };
    [n.x, n.y, n.z, -n.dot(&on_plane.coords)]
}

fn distance(plane: &[f64; 4], p: &Point3) -> f64 {
    (plane[0] * p.x + plane[1] * p.y + plane[2] * p.z + plane[3]).abs()
}

/// Least-squares plane through `points`: the centroid and the eigenvector of
/// the scatter matrix with the smallest eigenvalue.
fn fit_least_squares(points: &[&Point3]) -> [f64; 4] {
    let n = points.len() as f64;
    let centroid = points
        .iter()
        .fold(Vector3::zeros(), |acc, p| acc + p.coords)
        / n;
    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = p.coords - centroid;
        scatter += d * d.transpose();
    }
    let eig = scatter.symmetric_eigen();
    let (i, _) = eig.eigenvalues.argmin();
    let normal = eig.eigenvectors.column(i).into_owned().normalize();
    oriented(normal, &Point3::from(centroid))
}

/// RANSAC tabletop removal.
///
/// Each of `iterations` rounds draws three distinct points from a ChaCha8
/// stream seeded with `seed` and counts points within `inlier_eps` of their
/// plane. The best plane (earliest on ties) is refit by least squares on its
/// inliers, the refit's inliers are removed, and the refit is returned. If
/// the best plane holds fewer than [`MIN_INLIER_FRACTION`] of the points the
/// cloud comes back unchanged with a warning.
pub fn remove_plane(
    cloud: &PointCloud,
    iterations: usize,
    inlier_eps: f64,
    seed: u64,
) -> Result<PlaneRemoval> {
    let pts = cloud.points();
    if pts.len() < 3 {
        return Err(Error::InvalidGeometry(format!(
            "plane fitting needs at least 3 points, got {}",
            pts.len()
        )));
    }
    if iterations == 0 || !(inlier_eps > 0.0) {
        return Err(Error::InvalidConfig(
            "RANSAC needs iterations > 0 and inlier_eps > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<([f64; 4], usize)> = None;
    for _ in 0..iterations {
        let i = rng.random_range(0..pts.len());
        let j = rng.random_range(0..pts.len());
        let k = rng.random_range(0..pts.len());
        if i == j || j == k || i == k {
            continue;
        }
        let Some(plane) = plane_through(&pts[i], &pts[j], &pts[k]) else {
            continue;
        };
        let count = pts
            .iter()
            .filter(|p| distance(&plane, p) <= inlier_eps)
            .count();
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((plane, count));
        }
    }

    let unchanged = |fraction: f64, why: String| PlaneRemoval {
        filtered: cloud.clone(),
        plane: None,
        inlier_fraction: fraction,
        warning: Some(why),
    };
    let Some((rough, count)) = best else {
        return Ok(unchanged(0.0, "no non-degenerate plane sample".into()));
    };
    let fraction = count as f64 / pts.len() as f64;
    if fraction < MIN_INLIER_FRACTION {
        return Ok(unchanged(
            fraction,
            format!(
                "largest plane holds {:.1}% of points, below {:.0}%",
                100.0 * fraction,
                100.0 * MIN_INLIER_FRACTION
            ),
        ));
    }

    let inliers: Vec<&Point3> = pts
        .iter()
        .filter(|p| distance(&rough, p) <= inlier_eps)
        .collect();
    let refined = if inliers.len() >= 3 {
        fit_least_squares(&inliers)
    } else {
        rough
    };
    // keep the refit only if it explains at least as many points
    let refined_count = pts
        .iter()
        .filter(|p| distance(&refined, p) <= inlier_eps)
        .count();
    let plane = if refined_count >= count {
        refined
    } else {
        rough
    };
    let kept: Vec<Point3> = pts
        .iter()
        .filter(|p| distance(&plane, p) > inlier_eps)
        .copied()
        .collect();
    let removed = pts.len() - kept.len();
    Ok(PlaneRemoval {
        filtered: PointCloud::new(kept, cloud.frame())?,
        plane: Some(plane),
        inlier_fraction: removed as f64 / pts.len() as f64,
        warning: None,
    })
}

/// Rigid transform taking the plane to `z = 0` with its normal along `+z`,
/// using the smallest rotation that aligns the normals (no yaw is added).
pub fn gravity_alignment(plane: &[f64; 4]) -> Isometry3<f64> {
    let n = Vector3::new(plane[0], plane[1], plane[2]).normalize();
    let rotation = UnitQuaternion::rotation_between(&n, &Vector3::z()).unwrap_or_else(|| {
        UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
    });
    // the plane's closest point to the origin, -d * n, must land on z = 0
    let foot = Point3::from(-plane[3] * n);
    let lifted = rotation * foot;
    Isometry3::from_parts(Translation3::new(0.0, 0.0, -lifted.z), rotation)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_plane(n: usize, z: impl Fn(f64, f64) -> f64) -> Vec<Point3> {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (i as f64 * 0.01 - 0.2, j as f64 * 0.01 - 0.2);
                pts.push(Point3::new(x, y, z(x, y)));
            }
        }
        pts
    }

    #[test]
    fn pure_plane_is_removed_entirely() {
        let cloud = PointCloud::world(grid_plane(30, |_, _| 0.0)).unwrap();
        let r = remove_plane(&cloud, 100, 0.002, 1).unwrap();
        assert!(r.filtered.is_empty());
        assert!(r.warning.is_none());
        let p = r.plane.unwrap();
        assert!((p[2] - 1.0).abs() < 1e-9 && p[3].abs() < 1e-9);
    }

    #[test]
    fn tilted_plane_alignment_flattens_it() {
        let pts = grid_plane(20, |x, y| 0.3 + 0.2 * x - 0.1 * y);
        let cloud = PointCloud::world(pts.clone()).unwrap();
        let r = remove_plane(&cloud, 200, 0.001, 3).unwrap();
        let iso = gravity_alignment(&r.plane.unwrap());
        for p in &pts {
            assert!((iso * p).z.abs() < 1e-9);
        }
    }

    #[test]
    fn scattered_cloud_is_left_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pts: Vec<Point3> = (0..500)
            .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let cloud = PointCloud::world(pts).unwrap();
        let r = remove_plane(&cloud, 200, 0.002, 7).unwrap();
        assert_eq!(r.filtered, cloud);
        assert!(r.plane.is_none());
        assert!(r.warning.is_some());
    }

    #[test]
    fn too_few_points() {
        let cloud = PointCloud::world(vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)]).unwrap();
        assert!(remove_plane(&cloud, 10, 0.01, 0).is_err());
    }

    #[test]
    fn deterministic_for_a_seed() {
        let mut pts = grid_plane(25, |_, _| 0.0);
        pts.extend(grid_plane(6, |x, _| 0.05 + x));
        let cloud = PointCloud::world(pts).unwrap();
        assert_eq!(
            remove_plane(&cloud, 50, 0.002, 11).unwrap(),
            remove_plane(&cloud, 50, 0.002, 11).unwrap()
        );
    }
}

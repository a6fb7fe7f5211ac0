use std::f64::consts::{PI, TAU};

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::{Point3, PointCloud};

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Smallest absolute rotation between two yaw angles, in `[0, π]`.
pub fn shortest_angular_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    let d = d.min(TAU - d);
    d.clamp(0.0, PI)
}

/// Planar pose on the table: translation in the gravity-aligned world frame
/// and yaw about the world z axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawPose")]
pub struct RigidPose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Deserialize)]
struct RawPose {
    x: f64,
    y: f64,
    theta: f64,
}

impl From<RawPose> for RigidPose2D {
    fn from(raw: RawPose) -> Self {
        RigidPose2D::new(raw.x, raw.y, raw.theta)
    }
}

impl Default for RigidPose2D {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidPose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }

    pub fn inverse(&self) -> Self {
        let (s, c) = self.theta.sin_cos();
        Self::new(
            -(c * self.x + s * self.y),
            s * self.x - c * self.y,
            -self.theta,
        )
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &RigidPose2D) -> Self {
        let (s, c) = self.theta.sin_cos();
        Self::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )
    }

    pub fn to_isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(
            Translation3::new(self.x, self.y, 0.0),
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), self.theta),
        )
    }

    #[inline]
    pub fn apply(&self, p: &Point3) -> Point3 {
        let (s, c) = self.theta.sin_cos();
        Point3::new(c * p.x - s * p.y + self.x, s * p.x + c * p.y + self.y, p.z)
    }

    /// Maps a world point into the posed object's frame.
    #[inline]
    pub fn apply_inverse(&self, p: &Point3) -> Point3 {
        let (s, c) = self.theta.sin_cos();
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        Point3::new(c * dx + s * dy, -s * dx + c * dy, p.z)
    }
}

/// Anything that rigidly maps points.
pub trait RigidTransform {
    fn transform_point(&self, p: &Point3) -> Point3;
}

impl RigidTransform for RigidPose2D {
    fn transform_point(&self, p: &Point3) -> Point3 {
        self.apply(p)
    }
}

impl RigidTransform for Isometry3<f64> {
    fn transform_point(&self, p: &Point3) -> Point3 {
        self * p
    }
}

/// Applies a rigid transform to every point, preserving count and order.
pub fn transform_cloud<T: RigidTransform + ?Sized>(cloud: &PointCloud, pose: &T) -> PointCloud {
    let points = cloud
        .points()
        .iter()
        .map(|p| pose.transform_point(p))
        .collect();
    PointCloud::from_trusted(points, cloud.frame())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identity_leaves_cloud_unchanged() {
        let cloud = PointCloud::world(vec![
            Point3::new(0.1, -0.2, 0.3),
            Point3::new(1.0, 2.0, 3.0),
        ])
        .unwrap();
        assert_eq!(transform_cloud(&cloud, &RigidPose2D::identity()), cloud);
        assert_eq!(transform_cloud(&cloud, &Isometry3::identity()), cloud);
    }

    #[test]
    fn half_turn() {
        let cloud = PointCloud::world(vec![Point3::new(1.0, 0.0, 0.0)]).unwrap();
        let out = transform_cloud(&cloud, &RigidPose2D::new(0.0, 0.0, PI));
        let p = out.points()[0];
        assert_abs_diff_eq!(p.x, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn angular_difference_examples() {
        assert_abs_diff_eq!(shortest_angular_difference(0.0, TAU), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            shortest_angular_difference(PI / 2.0, -PI / 2.0),
            PI,
            epsilon = 1e-12
        );
        // min_k |0.1 - 6.2 + 2πk| is attained at k = 1
        let oracle = (0.1 - 6.2 + TAU).abs();
        assert_abs_diff_eq!(
            shortest_angular_difference(0.1, 6.2),
            oracle,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(oracle, 0.18319, epsilon = 1e-5);
    }

    #[test]
    fn normalize_wraps_into_range() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_abs_diff_eq!(normalize_angle(-PI / 2.0), 1.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(normalize_angle(5.0 * PI), PI, epsilon = 1e-12);
        assert!(normalize_angle(-1e-18) < TAU);
    }

    #[test]
    fn pose_matches_isometry() {
        let pose = RigidPose2D::new(0.3, -0.1, 1.1);
        let iso = pose.to_isometry();
        let p = Point3::new(0.05, 0.02, 0.07);
        let a = pose.apply(&p);
        let b = iso * p;
        assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((pose.apply_inverse(&a) - p).norm(), 0.0, epsilon = 1e-12);
    }

    fn brute_angle(a: f64, b: f64) -> f64 {
        (-8..=8)
            .map(|k| (a - b + TAU * k as f64).abs())
            .fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #[test]
        fn compose_inverse_round_trips(
            x in -2.0..2.0f64, y in -2.0..2.0f64, t in -10.0..10.0f64,
            pts in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..50),
        ) {
            let pose = RigidPose2D::new(x, y, t);
            let cloud = PointCloud::world(pts.iter().map(|&(a, b, c)| Point3::new(a, b, c)).collect()).unwrap();
            let back = transform_cloud(&transform_cloud(&cloud, &pose), &pose.inverse());
            for (p, q) in cloud.points().iter().zip(back.points()) {
                prop_assert!((p - q).abs().max() < 1e-9);
            }
            let composed = pose.compose(&pose.inverse());
            prop_assert!(composed.x.abs() < 1e-9 && composed.y.abs() < 1e-9);
            prop_assert!(shortest_angular_difference(composed.theta, 0.0) < 1e-9);
        }

        #[test]
        fn transform_preserves_distances(
            x in -2.0..2.0f64, y in -2.0..2.0f64, t in -10.0..10.0f64,
            a in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            b in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        ) {
            let pose = RigidPose2D::new(x, y, t);
            let pa = Point3::new(a.0, a.1, a.2);
            let pb = Point3::new(b.0, b.1, b.2);
            let before = (pa - pb).norm();
            let after = (pose.apply(&pa) - pose.apply(&pb)).norm();
            prop_assert!((before - after).abs() <= 1e-9 * before.max(1e-12) + 1e-15);
        }

        #[test]
        fn angular_difference_properties(a in -20.0..20.0f64, b in -20.0..20.0f64) {
            let d = shortest_angular_difference(a, b);
            prop_assert!((0.0..=PI).contains(&d));
            prop_assert!((d - shortest_angular_difference(b, a)).abs() < 1e-12);
            prop_assert!((d - shortest_angular_difference(a + TAU, b)).abs() < 1e-9);
            prop_assert!((d - shortest_angular_difference(a, b + TAU)).abs() < 1e-9);
            prop_assert!((d - brute_angle(a, b)).abs() < 1e-9);
        }
    }
}

//! Spatial primitives: points, clouds, planar poses, camera, meshes, volumes
//! and an exact nearest-neighbor index.

mod camera;
mod kdtree;
mod mesh;
mod normals;
mod pose;
mod volume;

pub use camera::CameraModel;
pub use kdtree::SpatialIndex;
pub use mesh::TriMesh;
pub use normals::estimate_normals;
pub use pose::{
    normalize_angle, shortest_angular_difference, transform_cloud, RigidPose2D, RigidTransform,
};
pub use volume::{inscribed_cylinder, point_in_volume, volumes_intersect, VolumeApprox};

use crate::error::{Error, Result};

/// A 3D point in meters.
pub type Point3 = nalgebra::Point3<f64>;

/// Coordinate frame a cloud is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    Camera,
    #[default]
    World,
}

/// An ordered set of finite points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
    frame: Frame,
}

impl PointCloud {
    /// Builds a cloud, rejecting non-finite coordinates.
    pub fn new(points: Vec<Point3>, frame: Frame) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !is_finite(p)) {
            return Err(Error::InvalidGeometry(format!(
                "point {i} has a non-finite coordinate"
            )));
        }
        Ok(Self { points, frame })
    }

    /// Builds a world-frame cloud.
    pub fn world(points: Vec<Point3>) -> Result<Self> {
        Self::new(points, Frame::World)
    }

    pub(crate) fn from_trusted(points: Vec<Point3>, frame: Frame) -> Self {
        debug_assert!(points.iter().all(is_finite));
        Self { points, frame }
    }

    pub fn empty(frame: Frame) -> Self {
        Self {
            points: Vec::new(),
            frame,
        }
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// The same points in the world frame, using `camera`'s extrinsic when
    /// the cloud is camera-relative.
    pub fn to_world(&self, camera: &CameraModel) -> PointCloud {
        match self.frame {
            Frame::World => self.clone(),
            Frame::Camera => Self::from_trusted(
                self.points
                    .iter()
                    .map(|p| camera.camera_to_world() * p)
                    .collect(),
                Frame::World,
            ),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Axis-aligned bounds as `(min, max)`; `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Point3, Point3)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        }))
    }
}

pub(crate) fn is_finite(p: &Point3) -> bool {
    p.x.is_finite() && p.y.is_finite() && p.z.is_finite()
}

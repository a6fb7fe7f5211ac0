//! Software pinhole depth rendering.
//!
//! Triangles are rasterized with an inclusive coverage test at pixel
//! centers; the depth written for a covered pixel is the exact intersection of
//! that pixel's ray with the triangle's plane, so the z-buffer is independent
//! of draw order.

mod raster;

use crate::error::{Error, Result};
use crate::geometry::{CameraModel, Frame, Point3, PointCloud, RigidPose2D, TriMesh};

pub use raster::DepthRegion;

/// Depth value of a pixel with no surface along its ray.
pub const NO_RETURN: f64 = f64::INFINITY;

/// Default tolerance separating z-fighting from true occlusion, meters.
pub const DEFAULT_EPS_RENDER: f64 = 1e-4;

/// Row-major camera-frame depth image (meters along the optical axis).
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    width: usize,
    height: usize,
    depth: Vec<f64>,
    camera: CameraModel,
}

impl DepthImage {
    /// All-`NO_RETURN` image matching the camera.
    pub fn empty(camera: &CameraModel) -> Self {
        Self {
            width: camera.width,
            height: camera.height,
            depth: vec![NO_RETURN; camera.width * camera.height],
            camera: camera.clone(),
        }
    }

    /// Wraps raw depths; every value must be `NO_RETURN` or finite and positive.
    pub fn from_depths(camera: &CameraModel, depth: Vec<f64>) -> Result<Self> {
        if depth.len() != camera.width * camera.height {
            return Err(Error::InvalidGeometry(format!(
                "depth buffer has {} values, camera expects {}",
                depth.len(),
                camera.width * camera.height
            )));
        }
        if let Some(i) = depth
            .iter()
            .position(|&d| !(d == NO_RETURN || (d.is_finite() && d > 0.0)))
        {
            return Err(Error::InvalidGeometry(format!(
                "pixel {i} has invalid depth {}",
                depth[i]
            )));
        }
        Ok(Self {
            width: camera.width,
            height: camera.height,
            depth,
            camera: camera.clone(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn camera(&self) -> &CameraModel {
        &self.camera
    }

    pub fn depths(&self) -> &[f64] {
        &self.depth
    }

    #[inline]
    pub fn at(&self, u: usize, v: usize) -> f64 {
        self.depth[v * self.width + u]
    }

    #[inline]
    pub fn has_return(&self, pixel: usize) -> bool {
        self.depth[pixel] != NO_RETURN
    }

    pub fn count_returns(&self) -> usize {
        self.depth.iter().filter(|&&d| d != NO_RETURN).count()
    }

    /// World point for a pixel with a return.
    #[inline]
    pub fn pixel_point(&self, pixel: usize) -> Point3 {
        let u = (pixel % self.width) as f64;
        let v = (pixel / self.width) as f64;
        self.camera.back_project(u, v, self.depth[pixel])
    }

    /// Z-buffers one posed mesh into this image.
    pub fn draw(&mut self, mesh: &TriMesh, pose: &RigidPose2D) {
        let region = DepthRegion::render(mesh, pose, &self.camera);
        self.merge_region(&region);
    }

    /// Per-pixel minimum with a rendered region.
    pub fn merge_region(&mut self, region: &DepthRegion) {
        for (pixel, d) in region.returns(self.width) {
            let slot = &mut self.depth[pixel];
            if d < *slot {
                *slot = d;
            }
        }
    }

    pub(crate) fn set(&mut self, pixel: usize, d: f64) {
        self.depth[pixel] = d;
    }

    fn check_same_size(&self, other: &DepthImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                left_w: self.width,
                left_h: self.height,
                right_w: other.width,
                right_h: other.height,
            });
        }
        Ok(())
    }
}

/// Renders all posed meshes with a shared z-buffer.
pub fn render_depth(models: &[(&TriMesh, RigidPose2D)], camera: &CameraModel) -> DepthImage {
    let mut img = DepthImage::empty(camera);
    for (mesh, pose) in models {
        img.draw(mesh, pose);
    }
    img
}

/// Back-projects every pixel with a return into the world frame, in
/// row-major pixel order.
pub fn depth_to_cloud(img: &DepthImage) -> PointCloud {
    let points = (0..img.depth.len())
        .filter(|&i| img.has_return(i))
        .map(|i| img.pixel_point(i))
        .collect();
    PointCloud::from_trusted(points, Frame::World)
}

/// True iff `child` hides or removes any surface present in `parent`: some
/// pixel where the parent has a return and the child is nearer by more than
/// `eps_render`, or has no return at all.
pub fn occludes(parent: &DepthImage, child: &DepthImage, eps_render: f64) -> Result<bool> {
    parent.check_same_size(child)?;
    Ok(parent
        .depth
        .iter()
        .zip(&child.depth)
        .any(|(&p, &c)| p != NO_RETURN && (c == NO_RETURN || c < p - eps_render)))
}

/// True iff every parent return survives in `child` within `eps_render`.
pub fn persists(parent: &DepthImage, child: &DepthImage, eps_render: f64) -> Result<bool> {
    parent.check_same_size(child)?;
    Ok(parent
        .depth
        .iter()
        .zip(&child.depth)
        .all(|(&p, &c)| p == NO_RETURN || (c != NO_RETURN && (c - p).abs() <= eps_render)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Isometry3, Matrix3};

    /// Camera looking straight down the world -z axis from height `h`.
    fn top_down(width: usize, height: usize, f: f64, h: f64) -> CameraModel {
        // camera x = world x, camera y = -world y, camera z = -world z
        let r = Matrix3::new(1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0);
        CameraModel::from_rotation_matrix(
            f,
            f,
            (width as f64 - 1.0) / 2.0,
            (height as f64 - 1.0) / 2.0,
            width,
            height,
            r,
            [0.0, 0.0, h],
        )
        .unwrap()
    }

    #[test]
    fn empty_scene_has_no_returns() {
        let cam = top_down(16, 12, 20.0, 1.0);
        let img = render_depth(&[], &cam);
        assert_eq!(img.count_returns(), 0);
        assert!(depth_to_cloud(&img).is_empty());
    }

    #[test]
    fn fronto_parallel_cube_face() {
        // top face of a unit cube sits 1 m below a camera at 2 m
        let cam = top_down(31, 31, 30.0, 2.0);
        let cube = TriMesh::cuboid(1.0, 1.0, 1.0).unwrap();
        let img = render_depth(&[(&cube, RigidPose2D::identity())], &cam);
        assert_abs_diff_eq!(img.at(15, 15), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn principal_point_back_projects_on_axis() {
        let cam = top_down(5, 5, 10.0, 2.0);
        let mut depth = vec![NO_RETURN; 25];
        depth[2 * 5 + 2] = 0.75;
        let img = DepthImage::from_depths(&cam, depth).unwrap();
        let cloud = depth_to_cloud(&img);
        assert_eq!(cloud.len(), 1);
        let p = cloud.points()[0];
        assert_abs_diff_eq!(
            (p - Point3::new(0.0, 0.0, 1.25)).norm(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn rejects_invalid_depths() {
        let cam = top_down(2, 2, 10.0, 1.0);
        assert!(DepthImage::from_depths(&cam, vec![1.0, -1.0, NO_RETURN, 2.0]).is_err());
        assert!(DepthImage::from_depths(&cam, vec![1.0; 3]).is_err());
    }

    #[test]
    fn occlusion_cases() {
        let cam = CameraModel::with_fov(
            32,
            24,
            1.0,
            Point3::new(0.0, -0.6, 0.3),
            Point3::new(0.0, 0.0, 0.05),
        )
        .unwrap();
        let cube = TriMesh::cuboid(0.05, 0.05, 0.05).unwrap();
        let parent = render_depth(&[(&cube, RigidPose2D::identity())], &cam);
        assert!(!occludes(&parent, &parent, DEFAULT_EPS_RENDER).unwrap());

        let behind = render_depth(
            &[
                (&cube, RigidPose2D::identity()),
                (&cube, RigidPose2D::new(0.0, 0.2, 0.0)),
            ],
            &cam,
        );
        assert!(!occludes(&parent, &behind, DEFAULT_EPS_RENDER).unwrap());
        assert!(persists(&parent, &behind, DEFAULT_EPS_RENDER).unwrap());

        let in_front = render_depth(
            &[
                (&cube, RigidPose2D::identity()),
                (&cube, RigidPose2D::new(0.0, -0.08, 0.0)),
            ],
            &cam,
        );
        assert!(occludes(&parent, &in_front, DEFAULT_EPS_RENDER).unwrap());

        let other = DepthImage::empty(&top_down(4, 4, 10.0, 1.0));
        assert!(matches!(
            occludes(&parent, &other, DEFAULT_EPS_RENDER),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn render_is_order_independent() {
        let cam = CameraModel::with_fov(
            40,
            30,
            1.0,
            Point3::new(0.1, -0.5, 0.35),
            Point3::new(0.0, 0.0, 0.0),
        )
        .unwrap();
        let a = TriMesh::cuboid(0.06, 0.04, 0.1).unwrap();
        let b = TriMesh::cylinder(0.03, 0.08, 24).unwrap();
        let pa = RigidPose2D::new(0.02, 0.03, 0.4);
        let pb = RigidPose2D::new(-0.03, -0.02, 0.0);
        let ab = render_depth(&[(&a, pa), (&b, pb)], &cam);
        let ba = render_depth(&[(&b, pb), (&a, pa)], &cam);
        assert_eq!(ab, ba);
    }

    #[test]
    fn camera_behind_objects_sees_nothing() {
        let cam = CameraModel::new(
            10.0,
            10.0,
            4.0,
            4.0,
            8,
            8,
            Isometry3::translation(0.0, 0.0, -5.0),
        )
        .unwrap();
        let cube = TriMesh::cuboid(0.1, 0.1, 0.1).unwrap();
        assert_eq!(
            render_depth(&[(&cube, RigidPose2D::identity())], &cam).count_returns(),
            0
        );
    }
}

use nalgebra::{Isometry3, Matrix3, Rotation3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::Point3;
use crate::error::{Error, Result};

/// Pinhole camera with a world→camera extrinsic.
///
/// Camera frame convention: +x right, +y down, +z along the optical axis.
/// Pixel `(u, v)` has its center at image coordinates `(u, v)`, so the ray
/// through the principal point `(cx, cy)` is the optical axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CameraFile", into = "CameraFile")]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    world_to_camera: Isometry3<f64>,
    camera_to_world: Isometry3<f64>,
}

/// On-disk camera representation: intrinsics plus a row-major rotation and a
/// translation for the world→camera transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CameraFile {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    width: usize,
    height: usize,
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

impl TryFrom<CameraFile> for CameraModel {
    type Error = Error;

    fn try_from(f: CameraFile) -> Result<Self> {
        let r = Matrix3::from_fn(|i, j| f.rotation[i][j]);
        Self::from_rotation_matrix(f.fx, f.fy, f.cx, f.cy, f.width, f.height, r, f.translation)
    }
}

impl From<CameraModel> for CameraFile {
    fn from(c: CameraModel) -> Self {
        let r = c.world_to_camera.rotation.to_rotation_matrix();
        let m = r.matrix();
        let t = c.world_to_camera.translation.vector;
        CameraFile {
            fx: c.fx,
            fy: c.fy,
            cx: c.cx,
            cy: c.cy,
            width: c.width,
            height: c.height,
            rotation: [
                [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
                [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
                [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
            ],
            translation: [t.x, t.y, t.z],
        }
    }
}

impl CameraModel {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
        world_to_camera: Isometry3<f64>,
    ) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite()) {
            return Err(Error::InvalidCamera(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidCamera("image must be non-empty".into()));
        }
        if !(0.0..width as f64).contains(&cx) || !(0.0..height as f64).contains(&cy) {
            return Err(Error::InvalidCamera(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        let t = world_to_camera.translation.vector;
        if !(t.x.is_finite() && t.y.is_finite() && t.z.is_finite()) {
            return Err(Error::InvalidCamera("non-finite translation".into()));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            world_to_camera,
            camera_to_world: world_to_camera.inverse(),
        })
    }

    /// Builds a camera from an explicit rotation matrix, checking it is a
    /// proper rotation to within 1e-9.
    #[allow(clippy::too_many_arguments)]
    pub fn from_rotation_matrix(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
        rotation: Matrix3<f64>,
        translation: [f64; 3],
    ) -> Result<Self> {
        let orth = (rotation.transpose() * rotation - Matrix3::identity())
            .abs()
            .max();
        let det = rotation.determinant();
        if !(orth <= 1e-9 && (det - 1.0).abs() <= 1e-9) {
            return Err(Error::InvalidCamera(format!(
                "rotation is not orthonormal with det +1 (orthogonality error {orth:e}, det {det})"
            )));
        }
        let rot = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(rotation));
        let iso = Isometry3::from_parts(
            Translation3::new(translation[0], translation[1], translation[2]),
            rot,
        );
        Self::new(fx, fy, cx, cy, width, height, iso)
    }

    /// Camera at `eye` looking at `target`, with world +z as "up".
    #[allow(clippy::too_many_arguments)]
    pub fn look_at(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: usize,
        height: usize,
        eye: Point3,
        target: Point3,
    ) -> Result<Self> {
        let forward = target - eye;
        if forward.norm() < 1e-12 {
            return Err(Error::InvalidCamera("eye and target coincide".into()));
        }
        let z = forward.normalize();
        let up = Vector3::z();
        let x = z.cross(&up);
        if x.norm() < 1e-9 {
            return Err(Error::InvalidCamera(
                "viewing direction parallel to up".into(),
            ));
        }
        let x = x.normalize();
        let y = z.cross(&x);
        // rows are the camera axes expressed in world coordinates
        let r = Matrix3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
        let t = -(r * eye.coords);
        Self::from_rotation_matrix(fx, fy, cx, cy, width, height, r, [t.x, t.y, t.z])
    }

    /// Tabletop preset: `width`×`height` image, horizontal field of view
    /// `hfov` radians, camera at `eye` looking at `target`.
    pub fn with_fov(
        width: usize,
        height: usize,
        hfov: f64,
        eye: Point3,
        target: Point3,
    ) -> Result<Self> {
        let f = (width as f64 / 2.0) / (hfov / 2.0).tan();
        Self::look_at(
            f,
            f,
            (width as f64 - 1.0) / 2.0,
            (height as f64 - 1.0) / 2.0,
            width,
            height,
            eye,
            target,
        )
    }

    pub fn world_to_camera(&self) -> &Isometry3<f64> {
        &self.world_to_camera
    }

    pub fn camera_to_world(&self) -> &Isometry3<f64> {
        &self.camera_to_world
    }

    /// Optical center in world coordinates.
    pub fn eye(&self) -> Point3 {
        self.camera_to_world * Point3::origin()
    }

    /// Projects a camera-frame point to image coordinates; `None` when the
    /// point is not in front of the camera.
    #[inline]
    pub fn project_camera(&self, p: &Point3) -> Option<(f64, f64)> {
        if p.z <= 0.0 {
            return None;
        }
        Some((self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }

    /// Projects a world point to `(u, v, depth)`.
    pub fn project(&self, p: &Point3) -> Option<(f64, f64, f64)> {
        let c = self.world_to_camera * p;
        self.project_camera(&c).map(|(u, v)| (u, v, c.z))
    }

    /// Camera-frame ray through pixel `(u, v)`, scaled so its z component is 1.
    #[inline]
    pub fn pixel_ray(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }

    /// World point seen at pixel `(u, v)` with camera-frame depth `z`.
    #[inline]
    pub fn back_project(&self, u: f64, v: f64, z: f64) -> Point3 {
        let c = Point3::from(self.pixel_ray(u, v) * z);
        self.camera_to_world * c
    }

    /// The same physical camera after the world frame is changed by `change`
    /// (new world coordinates are `change * old`).
    pub fn reframed(&self, change: &Isometry3<f64>) -> Self {
        let world_to_camera = self.world_to_camera * change.inverse();
        Self {
            world_to_camera,
            camera_to_world: world_to_camera.inverse(),
            ..self.clone()
        }
    }

    pub fn same_geometry(&self, other: &CameraModel) -> bool {
        self.width == other.width && self.height == other.height
    }
}

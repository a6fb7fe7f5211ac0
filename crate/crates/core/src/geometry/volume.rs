use serde::{Deserialize, Serialize};

use super::{Point3, RigidPose2D, TriMesh};
use crate::error::{Error, Result};

/// Vertical cylinder in a model's frame, used as a conservative stand-in for
/// the space the object occupies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeApprox {
    pub center_offset: [f64; 2],
    pub radius: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl VolumeApprox {
    pub fn new(center_offset: [f64; 2], radius: f64, z_min: f64, z_max: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "volume radius must be positive, got {radius}"
            )));
        }
        if !(z_max > z_min) {
            return Err(Error::InvalidGeometry(format!(
                "volume z range is empty: [{z_min}, {z_max}]"
            )));
        }
        Ok(Self {
            center_offset,
            radius,
            z_min,
            z_max,
        })
    }

    /// Cylinder axis position in the world for a posed object.
    pub fn world_center(&self, pose: &RigidPose2D) -> (f64, f64) {
        let c = pose.apply(&Point3::new(
            self.center_offset[0],
            self.center_offset[1],
            0.0,
        ));
        (c.x, c.y)
    }

    #[inline]
    pub fn contains_local(&self, q: &Point3) -> bool {
        let dx = q.x - self.center_offset[0];
        let dy = q.y - self.center_offset[1];
        dx * dx + dy * dy <= self.radius * self.radius && q.z >= self.z_min && q.z <= self.z_max
    }
}

/// Cylinder centered on the mesh's footprint bounding box, with radius equal
/// to half the smaller horizontal extent and the mesh's full height.
///
/// This is contained in the mesh for convex solids of revolution; for other
/// shapes it is a heuristic approximation.
pub fn inscribed_cylinder(mesh: &TriMesh) -> Result<VolumeApprox> {
    let (lo, hi) = mesh.bounds();
    let ex = hi.x - lo.x;
    let ey = hi.y - lo.y;
    if !(ex > 0.0 && ey > 0.0 && hi.z > lo.z) {
        return Err(Error::InvalidGeometry(format!(
            "mesh has zero extent ({ex} x {ey} x {})",
            hi.z - lo.z
        )));
    }
    VolumeApprox::new(
        [(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0],
        ex.min(ey) / 2.0,
        lo.z,
        hi.z,
    )
}

/// Whether a world point lies inside the posed cylinder (boundary inclusive).
#[inline]
pub fn point_in_volume(p: &Point3, vol: &VolumeApprox, pose: &RigidPose2D) -> bool {
    vol.contains_local(&pose.apply_inverse(p))
}

/// Whether two posed cylinders share interior space. Cylinders that only
/// touch are disjoint.
pub fn volumes_intersect(
    a: &VolumeApprox,
    pa: &RigidPose2D,
    b: &VolumeApprox,
    pb: &RigidPose2D,
) -> bool {
    let (ax, ay) = a.world_center(pa);
    let (bx, by) = b.world_center(pb);
    let reach = a.radius + b.radius;
    (ax - bx).powi(2) + (ay - by).powi(2) < reach * reach && a.z_min < b.z_max && b.z_min < a.z_max
}

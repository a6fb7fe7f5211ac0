use nalgebra::Vector3;

use super::NO_RETURN;
use crate::geometry::{CameraModel, Point3, RigidPose2D, TriMesh};

/// Surfaces closer than this to the optical center are clipped.
const NEAR: f64 = 1e-3;

/// A rectangular window of a depth image holding one rendered object.
#[derive(Debug, Clone)]
pub struct DepthRegion {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
    pub depth: Vec<f64>,
}

impl DepthRegion {
    /// Rasterizes a single posed mesh, restricting work to the window its
    /// projection can touch.
    pub fn render(mesh: &TriMesh, pose: &RigidPose2D, camera: &CameraModel) -> Self {
        let iso = camera.world_to_camera() * pose.to_isometry();
        let verts: Vec<Point3> = mesh.vertices().iter().map(|v| iso * v).collect();

        let (w, h) = (camera.width, camera.height);
        let window = if verts.iter().all(|v| v.z > NEAR) {
            let mut lo = (f64::INFINITY, f64::INFINITY);
            let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for v in &verts {
                let u = camera.fx * v.x / v.z + camera.cx;
                let vv = camera.fy * v.y / v.z + camera.cy;
                lo = (lo.0.min(u), lo.1.min(vv));
                hi = (hi.0.max(u), hi.1.max(vv));
            }
            pixel_span(lo.0, hi.0, w).zip(pixel_span(lo.1, hi.1, h))
        } else {
            Some(((0, w - 1), (0, h - 1)))
        };

        let Some(((x0, x1), (y0, y1))) = window else {
            return Self {
                x0: 0,
                y0: 0,
                width: 0,
                height: 0,
                depth: Vec::new(),
            };
        };
        let mut region = Self {
            x0,
            y0,
            width: x1 - x0 + 1,
            height: y1 - y0 + 1,
            depth: vec![NO_RETURN; (x1 - x0 + 1) * (y1 - y0 + 1)],
        };
        for tri in mesh.triangles() {
            let t = tri.map(|i| verts[i as usize]);
            region.raster_triangle(&t, camera);
        }
        region
    }

    /// `(image pixel index, depth)` for every pixel with a return.
    pub fn returns(&self, image_width: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.depth
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d != NO_RETURN)
            .map(move |(i, &d)| {
                let (rx, ry) = (i % self.width, i / self.width);
                ((self.y0 + ry) * image_width + self.x0 + rx, d)
            })
    }

    fn raster_triangle(&mut self, tri: &[Point3; 3], camera: &CameraModel) {
        let normal = (tri[1] - tri[0]).cross(&(tri[2] - tri[0]));
        let nd = normal.dot(&tri[0].coords);
        // plane through the optical center: seen edge-on
        if nd.abs() < 1e-15 {
            return;
        }

        let poly = clip_near(tri);
        if poly.len() < 3 {
            return;
        }
        let screen: Vec<(f64, f64)> = poly
            .iter()
            .map(|p| {
                (
                    camera.fx * p.x / p.z + camera.cx,
                    camera.fy * p.y / p.z + camera.cy,
                )
            })
            .collect();
        let mut area = 0.0;
        for i in 0..screen.len() {
            let (a, b) = (screen[i], screen[(i + 1) % screen.len()]);
            area += a.0 * b.1 - b.0 * a.1;
        }
        if area == 0.0 || !area.is_finite() {
            return;
        }
        let sign = area.signum();

        let (mut lo_u, mut lo_v, mut hi_u, mut hi_v) = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for &(u, v) in &screen {
            lo_u = lo_u.min(u);
            lo_v = lo_v.min(v);
            hi_u = hi_u.max(u);
            hi_v = hi_v.max(v);
        }
        let x_end = (self.x0 + self.width) as f64 - 1.0;
        let y_end = (self.y0 + self.height) as f64 - 1.0;
        let u0 = lo_u.ceil().max(self.x0 as f64);
        let u1 = hi_u.floor().min(x_end);
        let v0 = lo_v.ceil().max(self.y0 as f64);
        let v1 = hi_v.floor().min(y_end);
        if u0 > u1 || v0 > v1 {
            return;
        }
        let (u0, u1, v0, v1) = (u0 as usize, u1 as usize, v0 as usize, v1 as usize);

        let n = screen.len();
        for v in v0..=v1 {
            let vf = v as f64;
            for u in u0..=u1 {
                let uf = u as f64;
                let inside = (0..n).all(|i| {
                    let (a, b) = (screen[i], screen[(i + 1) % n]);
                    sign * ((b.0 - a.0) * (vf - a.1) - (b.1 - a.1) * (uf - a.0)) >= 0.0
                });
                if !inside {
                    continue;
                }
                let ray = Vector3::new(
                    (uf - camera.cx) / camera.fx,
                    (vf - camera.cy) / camera.fy,
                    1.0,
                );
                let z = nd / normal.dot(&ray);
                if !(z.is_finite() && z > NEAR) {
                    continue;
                }
                let slot = &mut self.depth[(v - self.y0) * self.width + (u - self.x0)];
                if z < *slot {
                    *slot = z;
                }
            }
        }
    }
}

/// Inclusive integer pixel range whose centers fall in `[lo, hi]`.
fn pixel_span(lo: f64, hi: f64, size: usize) -> Option<(usize, usize)> {
    let a = lo.ceil().max(0.0);
    let b = hi.floor().min(size as f64 - 1.0);
    (a <= b).then_some((a as usize, b as usize))
}

/// Sutherland–Hodgman clip of a triangle against `z >= NEAR`.
fn clip_near(tri: &[Point3; 3]) -> Vec<Point3> {
    if tri.iter().all(|p| p.z >= NEAR) {
        return tri.to_vec();
    }
    let mut out = Vec::with_capacity(4);
    for i in 0..3 {
        let (a, b) = (tri[i], tri[(i + 1) % 3]);
        let (ina, inb) = (a.z >= NEAR, b.z >= NEAR);
        if ina {
            out.push(a);
        }
        if ina != inb {
            let t = (NEAR - a.z) / (b.z - a.z);
            out.push(a + (b - a) * t);
        }
    }
    out
}

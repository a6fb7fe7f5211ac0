use std::f64::consts::TAU;

use super::{is_finite, Point3};
use crate::error::{Error, Result};

const MIN_TRIANGLE_AREA: f64 = 1e-12;
const BASE_PLANE_TOL: f64 = 1e-9;

/// Triangle mesh in a model's canonical frame (base plane at z = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    /// Validates indices, triangle areas and the base-plane convention.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::InvalidGeometry("mesh has no triangles".into()));
        }
        if let Some(i) = vertices.iter().position(|p| !is_finite(p)) {
            return Err(Error::InvalidGeometry(format!("vertex {i} is not finite")));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i as usize >= vertices.len()) {
                return Err(Error::InvalidGeometry(format!(
                    "triangle {t} references a vertex out of range"
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::InvalidGeometry(format!(
                    "triangle {t} is degenerate (area {area:e} m²)"
                )));
            }
        }
        let z_min = vertices.iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
        if z_min.abs() > BASE_PLANE_TOL {
            return Err(Error::InvalidGeometry(format!(
                "mesh base plane must be at z = 0, lowest vertex is at z = {z_min}"
            )));
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    /// Shifts the mesh vertically so its lowest vertex sits on z = 0, then validates.
    pub fn rebased(mut vertices: Vec<Point3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let z_min = vertices.iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
        if z_min.is_finite() {
            for v in &mut vertices {
                v.z -= z_min;
            }
        }
        Self::new(vertices, triangles)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, i: usize) -> [Point3; 3] {
        self.triangles[i].map(|v| self.vertices[v as usize])
    }

    /// Axis-aligned bounds `(min, max)`.
    pub fn bounds(&self) -> (Point3, Point3) {
        let first = self.vertices[0];
        self.vertices.iter().fold((first, first), |(lo, hi), p| {
            (
                Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z)),
                Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z)),
            )
        })
    }

    /// Largest horizontal distance from the model origin to any vertex.
    pub fn footprint_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.x.hypot(p.y))
            .fold(0.0, f64::max)
    }

    /// Axis-aligned box spanning `[min, max]`; `min.z` must be 0.
    pub fn aligned_box(min: Point3, max: Point3) -> Result<Self> {
        let v = |x: f64, y: f64, z: f64| Point3::new(x, y, z);
        let vertices = vec![
            v(min.x, min.y, min.z),
            v(max.x, min.y, min.z),
            v(max.x, max.y, min.z),
            v(min.x, max.y, min.z),
            v(min.x, min.y, max.z),
            v(max.x, min.y, max.z),
            v(max.x, max.y, max.z),
            v(min.x, max.y, max.z),
        ];
        // outward-facing winding
        let triangles = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        Self::new(vertices, triangles)
    }

    /// Box of size `sx`×`sy`×`sz` centered on the z axis, resting on z = 0.
    pub fn cuboid(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        Self::aligned_box(
            Point3::new(-sx / 2.0, -sy / 2.0, 0.0),
            Point3::new(sx / 2.0, sy / 2.0, sz),
        )
    }

    /// Closed cylinder around the z axis with `segments` sides.
    pub fn cylinder(radius: f64, height: f64, segments: usize) -> Result<Self> {
        if segments < 3 {
            return Err(Error::InvalidGeometry(
                "cylinder needs at least 3 segments".into(),
            ));
        }
        let n = segments as u32;
        let mut vertices = Vec::with_capacity(2 * segments + 2);
        for i in 0..segments {
            let a = TAU * i as f64 / segments as f64;
            let (s, c) = a.sin_cos();
            vertices.push(Point3::new(radius * c, radius * s, 0.0));
            vertices.push(Point3::new(radius * c, radius * s, height));
        }
        let bottom = 2 * n;
        let top = 2 * n + 1;
        vertices.push(Point3::new(0.0, 0.0, 0.0));
        vertices.push(Point3::new(0.0, 0.0, height));
        let mut triangles = Vec::with_capacity(4 * segments);
        for i in 0..n {
            let j = (i + 1) % n;
            let (b0, t0, b1, t1) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
            triangles.push([b0, b1, t1]);
            triangles.push([b0, t1, t0]);
            triangles.push([bottom, b1, b0]);
            triangles.push([top, t0, t1]);
        }
        Self::new(vertices, triangles)
    }

    /// UV sphere of the given radius resting on z = 0.
    pub fn sphere(radius: f64, stacks: usize, slices: usize) -> Result<Self> {
        if stacks < 2 || slices < 3 {
            return Err(Error::InvalidGeometry(
                "sphere tessellation too coarse".into(),
            ));
        }
        let mut vertices = vec![Point3::new(0.0, 0.0, 0.0)];
        for i in 1..stacks {
            let phi = std::f64::consts::PI * i as f64 / stacks as f64;
            let (sp, cp) = phi.sin_cos();
            for j in 0..slices {
                let a = TAU * j as f64 / slices as f64;
                let (s, c) = a.sin_cos();
                vertices.push(Point3::new(
                    radius * sp * c,
                    radius * sp * s,
                    radius * (1.0 - cp),
                ));
            }
        }
        vertices.push(Point3::new(0.0, 0.0, 2.0 * radius));
        let ring = |i: usize, j: usize| (1 + (i - 1) * slices + j % slices) as u32;
        let last = (vertices.len() - 1) as u32;
        let mut triangles = Vec::new();
        for j in 0..slices {
            triangles.push([0, ring(1, j + 1), ring(1, j)]);
            triangles.push([last, ring(stacks - 1, j), ring(stacks - 1, j + 1)]);
        }
        for i in 1..stacks - 1 {
            for j in 0..slices {
                triangles.push([ring(i, j), ring(i, j + 1), ring(i + 1, j + 1)]);
                triangles.push([ring(i, j), ring(i + 1, j + 1), ring(i + 1, j)]);
            }
        }
        Self::new(vertices, triangles)
    }

    /// Flat rectangle on z = 0, e.g. a table top.
    pub fn quad(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self> {
        let vertices = vec![
            Point3::new(min_x, min_y, 0.0),
            Point3::new(max_x, min_y, 0.0),
            Point3::new(max_x, max_y, 0.0),
            Point3::new(min_x, max_y, 0.0),
        ];
        Self::new(vertices, vec![[0, 1, 2], [0, 2, 3]])
    }
}

//! Wavefront OBJ meshes.
//!
//! Only `v x y z [w]` and `f` lines are read; every other statement is
//! ignored. Face vertices may be `i`, `i/t`, `i//n` or `i/t/n`, 1-based, or
//! negative (relative to the latest vertex). Polygons with more than three
//! vertices are fan-triangulated from their first vertex. The mesh is shifted
//! vertically so its lowest vertex lies on z = 0.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point3, TriMesh};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        format: "OBJ",
        line,
        msg: msg.into(),
    }
}

pub fn parse(text: &str) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .take(3)
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| perr(i + 1, format!("bad coordinate {s:?}")))
                    })
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(perr(i + 1, "vertex needs three coordinates"));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = parts
                    .map(|tok| {
                        resolve(tok, vertices.len())
                            .ok_or_else(|| perr(i + 1, format!("bad face index {tok:?}")))
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(perr(i + 1, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::rebased(vertices, triangles)
}

fn resolve(token: &str, seen: usize) -> Option<u32> {
    let raw: i64 = token.split('/').next()?.parse().ok()?;
    let idx = if raw > 0 {
        raw - 1
    } else if raw < 0 {
        seen as i64 + raw
    } else {
        return None;
    };
    (0..seen as i64).contains(&idx).then_some(idx as u32)
}

pub fn read(path: impl AsRef<Path>) -> Result<TriMesh> {
    parse(&std::fs::read_to_string(path)?)
}

/// Writes `v` and `f` lines only.
pub fn to_string(mesh: &TriMesh) -> String {
    let mut s = String::new();
    for v in mesh.vertices() {
        s.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    s
}

pub fn write(path: impl AsRef<Path>, mesh: &TriMesh) -> Result<()> {
    std::fs::write(path, to_string(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quads_and_index_forms() {
        let text = "# cube-ish\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\nvn 0 0 1\nf 1/1/1 2//1 3 4\nf -4 -2 -1\n";
        let mesh = parse(text).unwrap();
        assert_eq!(mesh.triangles(), &[[0, 1, 2], [0, 2, 3], [0, 2, 3]]);
        // rebased onto z = 0
        assert!(mesh.vertices().iter().all(|v| v.z == 0.0));
    }

    #[test]
    fn errors() {
        assert!(parse("v 0 0\n").is_err());
        assert!(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n").is_err());
        assert!(parse("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n").is_err());
        assert!(parse("v 0 0 0\nf 0 1 1\n").is_err());
    }

    #[test]
    fn round_trip() {
        let mesh = TriMesh::cylinder(0.03, 0.1, 16).unwrap();
        assert_eq!(parse(&to_string(&mesh)).unwrap(), mesh);
    }
}

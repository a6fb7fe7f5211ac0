//! ASCII PCD (v0.7) point clouds.
//!
//! Writer output:
//!
//! ```text
//! # .PCD v0.7 - Point Cloud Data file format
//! # frame world
//! VERSION 0.7
//! FIELDS x y z
//! SIZE 8 8 8
//! TYPE F F F
//! COUNT 1 1 1
//! WIDTH <n>
//! HEIGHT 1
//! VIEWPOINT 0 0 0 1 0 0 0
//! POINTS <n>
//! DATA ascii
//! <x> <y> <z>        one line per point, shortest round-trip decimal form
//! ```
//!
//! The reader accepts any ASCII PCD whose FIELDS include `x`, `y` and `z`
//! (other fields are skipped, each with COUNT 1 assumed unless a COUNT line
//! says otherwise). Points with a NaN coordinate (PCL's marker for invalid
//! returns) are dropped. A `# frame camera` comment marks a camera-frame
//! cloud; the default is world.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Frame, Point3, PointCloud};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        format: "PCD",
        line,
        msg: msg.into(),
    }
}

pub fn to_string(cloud: &PointCloud) -> String {
    let n = cloud.len();
    let frame = match cloud.frame() {
        Frame::World => "world",
        Frame::Camera => "camera",
    };
    let mut s = String::with_capacity(64 * (n + 12));
    s.push_str("# .PCD v0.7 - Point Cloud Data file format\n");
    let _ = writeln!(s, "# frame {frame}");
    s.push_str("VERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\n");
    let _ = writeln!(
        s,
        "WIDTH {n}\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS {n}\nDATA ascii"
    );
    for p in cloud.points() {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.z);
    }
    s
}

pub fn parse(text: &str) -> Result<PointCloud> {
    let mut frame = Frame::World;
    let mut fields: Option<Vec<String>> = None;
    let mut counts: Option<Vec<usize>> = None;
    let mut declared: Option<usize> = None;
    let mut lines = text.lines().enumerate();

    for (i, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(tag) = comment.trim().strip_prefix("frame") {
                frame = match tag.trim() {
                    "camera" => Frame::Camera,
                    "world" => Frame::World,
                    other => return Err(perr(i + 1, format!("unknown frame {other:?}"))),
                };
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap_or_default().to_ascii_uppercase();
        let rest: Vec<&str> = parts.collect();
        match keyword.as_str() {
            "FIELDS" => fields = Some(rest.iter().map(|s| s.to_string()).collect()),
            "COUNT" => {
                counts = Some(
                    rest.iter()
                        .map(|c| {
                            c.parse()
                                .map_err(|_| perr(i + 1, format!("bad COUNT {c:?}")))
                        })
                        .collect::<Result<_>>()?,
                )
            }
            "POINTS" => {
                let n = rest
                    .first()
                    .ok_or_else(|| perr(i + 1, "POINTS without a value"))?;
                declared = Some(
                    n.parse()
                        .map_err(|_| perr(i + 1, format!("bad POINTS {n:?}")))?,
                );
            }
            "DATA" => {
                if rest.first().map(|s| s.to_ascii_lowercase()) != Some("ascii".into()) {
                    return Err(perr(i + 1, "only DATA ascii is supported"));
                }
                break;
            }
            "VERSION" | "SIZE" | "TYPE" | "WIDTH" | "HEIGHT" | "VIEWPOINT" => {}
            other => return Err(perr(i + 1, format!("unknown header keyword {other:?}"))),
        }
    }

    let fields = fields.ok_or_else(|| perr(0, "missing FIELDS"))?;
    let counts = counts.unwrap_or_else(|| vec![1; fields.len()]);
    if counts.len() != fields.len() {
        return Err(perr(0, "COUNT and FIELDS lengths differ"));
    }
    // column offset of each field
    let mut offsets = Vec::with_capacity(fields.len());
    let mut col = 0;
    for c in &counts {
        offsets.push(col);
        col += c;
    }
    let width = col;
    let column = |name: &str| {
        fields
            .iter()
            .position(|f| f == name)
            .map(|i| offsets[i])
            .ok_or_else(|| perr(0, format!("FIELDS lacks {name}")))
    };
    let (cx, cy, cz) = (column("x")?, column("y")?, column("z")?);

    let mut points = Vec::with_capacity(declared.unwrap_or(0));
    let mut rows = 0usize;
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<&str> = line.split_whitespace().collect();
        if vals.len() != width {
            return Err(perr(
                i + 1,
                format!("expected {width} values, found {}", vals.len()),
            ));
        }
        let num = |c: usize| -> Result<f64> {
            vals[c]
                .parse::<f64>()
                .map_err(|_| perr(i + 1, format!("bad number {:?}", vals[c])))
        };
        rows += 1;
        let p = Point3::new(num(cx)?, num(cy)?, num(cz)?);
        if p.x.is_nan() || p.y.is_nan() || p.z.is_nan() {
            continue;
        }
        points.push(p);
    }
    if let Some(n) = declared {
        if n != rows {
            return Err(perr(0, format!("POINTS declares {n} rows, found {rows}")));
        }
    }
    PointCloud::new(points, frame)
}

pub fn read(path: impl AsRef<Path>) -> Result<PointCloud> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn write(path: impl AsRef<Path>, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, to_string(cloud))?;
    Ok(())
}

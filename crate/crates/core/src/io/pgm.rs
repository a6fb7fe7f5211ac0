//! 16-bit binary PGM (P5) depth dumps for inspection.
//!
//! Each pixel stores `round(depth * 1000)` (millimeters) as a big-endian
//! u16, clamped to `[1, 65535]`; pixels with no return are written as 0.
//! The header is `P5\n<width> <height>\n65535\n`.

use std::path::Path;

use crate::render::DepthImage;

pub fn encode(img: &DepthImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    out.reserve(2 * img.depths().len());
    for &d in img.depths() {
        let mm: u16 = if d.is_finite() {
            (d * 1000.0).round().clamp(1.0, 65535.0) as u16
        } else {
            0
        };
        out.extend_from_slice(&mm.to_be_bytes());
    }
    out
}

pub fn write(path: impl AsRef<Path>, img: &DepthImage) -> std::io::Result<()> {
    std::fs::write(path, encode(img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CameraModel, Point3};
    use crate::render::NO_RETURN;

    #[test]
    fn encodes_millimeters() {
        let cam = CameraModel::with_fov(2, 1, 1.0, Point3::new(0.0, -1.0, 0.5), Point3::origin())
            .unwrap();
        let img = DepthImage::from_depths(&cam, vec![1.2344, NO_RETURN]).unwrap();
        let bytes = encode(&img);
        let header = b"P5\n2 1\n65535\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0x04, 0xD2, 0x00, 0x00]);
    }
}

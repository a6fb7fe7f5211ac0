use crate::error::{Error, Result};
use crate::geometry::{Point3, TriMesh};
use crate::msgt::ObjectModel;

/// Ids of the models returned by [`builtin_models`].
pub const BUILTIN_IDS: [&str; 5] = ["box", "cylinder", "step_block", "tall_box", "wide_box"];

/// A small set of tabletop objects: three boxes of different proportions,
/// a rotationally symmetric can and a stepped block whose appearance
/// changes under every rotation.
pub fn builtin_models() -> Vec<ObjectModel> {
    BUILTIN_IDS
        .iter()
        .map(|id| builtin_model(id).expect("built-in model"))
        .collect()
}

pub fn builtin_model(id: &str) -> Result<ObjectModel> {
    match id {
        "box" => ObjectModel::new(id, TriMesh::cuboid(0.07, 0.045, 0.09)?, false),
        "cylinder" => ObjectModel::new(id, TriMesh::cylinder(0.03, 0.11, 32)?, true),
        "step_block" => ObjectModel::new(id, step_block()?, false),
        "tall_box" => ObjectModel::new(id, TriMesh::cuboid(0.06, 0.035, 0.16)?, false),
        "wide_box" => ObjectModel::new(id, TriMesh::cuboid(0.1, 0.06, 0.05)?, false),
        other => Err(Error::InvalidConfig(format!(
            "no built-in model named {other:?}"
        ))),
    }
}

/// A 7 x 5 x 6 cm block with a 3.5 x 5 x 6 cm riser on its +x half.
fn step_block() -> Result<TriMesh> {
    let base = TriMesh::cuboid(0.07, 0.05, 0.06)?;
    let riser = TriMesh::cuboid(0.035, 0.05, 0.06)?;
    let mut vertices = base.vertices().to_vec();
    let mut triangles = base.triangles().to_vec();
    let offset = vertices.len() as u32;
    vertices.extend(
        riser
            .vertices()
            .iter()
            .map(|v| Point3::new(v.x + 0.0175, v.y, v.z + 0.06)),
    );
    triangles.extend(riser.triangles().iter().map(|t| t.map(|i| i + offset)));
    TriMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_resolves() {
        let models = builtin_models();
        assert_eq!(models.len(), BUILTIN_IDS.len());
        for (m, id) in models.iter().zip(BUILTIN_IDS) {
            assert_eq!(m.id, id);
            assert!(m.volume.radius > 0.0);
        }
        assert!(builtin_model("teapot").is_err());
    }
}

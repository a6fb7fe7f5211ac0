use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::geometry::{CameraModel, Point3, PointCloud, RigidPose2D, TriMesh};
use crate::msgt::{ObjectModel, ObjectPoseHypothesis};
use crate::render::{depth_to_cloud, render_depth};

/// A synthetic observation together with the poses that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthScene {
    pub observed: PointCloud,
    pub camera: CameraModel,
    pub truth: Vec<ObjectPoseHypothesis>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GroundTruthScene {
    pub fn required_ids(&self) -> Vec<String> {
        self.truth.iter().map(|t| t.model_id.clone()).collect()
    }
}

/// Camera used by the built-in scenes: 160x120, about 60 degrees of
/// horizontal field of view, looking down at the table origin from the front.
pub fn default_camera() -> CameraModel {
    CameraModel::look_at(
        160.0,
        160.0,
        79.5,
        59.5,
        160,
        120,
        Point3::new(0.0, -0.65, 0.45),
        Point3::new(0.0, 0.0, 0.03),
    )
    .expect("valid default camera")
}

/// Fails unless every vertex of every placed mesh projects inside the image
/// in front of the camera.
pub fn check_in_frustum(
    meshes: &[(&str, &TriMesh, RigidPose2D)],
    camera: &CameraModel,
) -> Result<()> {
    for (id, mesh, pose) in meshes {
        for v in mesh.vertices() {
            let w = pose.apply(v);
            let inside = camera.project(&w).is_some_and(|(u, v, _)| {
                u >= -0.5
                    && v >= -0.5
                    && u <= camera.width as f64 - 0.5
                    && v <= camera.height as f64 - 0.5
            });
            if !inside {
                return Err(Error::OutsideFrustum(format!(
                    "{id} at ({:.4}, {:.4}, {:.4} rad) leaves the image",
                    pose.x, pose.y, pose.theta
                )));
            }
        }
    }
    Ok(())
}

/// Renders `truth`, back-projects the depth image and perturbs every
/// coordinate with independent `N(0, noise_sigma^2)` noise drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn synthesize_scene(
    models: &BTreeMap<String, ObjectModel>,
    truth: &[ObjectPoseHypothesis],
    camera: &CameraModel,
    noise_sigma: f64,
    seed: u64,
) -> Result<GroundTruthScene> {
    synthesize(models, truth, None, camera, noise_sigma, seed)
}

/// Like [`synthesize_scene`] but with a square table top of half-width
/// `table_half_extent` centered at the origin on `z = 0`. The table is not
/// part of the truth.
pub fn synthesize_tabletop(
    models: &BTreeMap<String, ObjectModel>,
    truth: &[ObjectPoseHypothesis],
    table_half_extent: f64,
    camera: &CameraModel,
    noise_sigma: f64,
    seed: u64,
) -> Result<GroundTruthScene> {
    let h = table_half_extent;
    let table = TriMesh::quad(-h, -h, h, h)?;
    synthesize(models, truth, Some(&table), camera, noise_sigma, seed)
}

fn synthesize(
    models: &BTreeMap<String, ObjectModel>,
    truth: &[ObjectPoseHypothesis],
    table: Option<&TriMesh>,
    camera: &CameraModel,
    noise_sigma: f64,
    seed: u64,
) -> Result<GroundTruthScene> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise sigma must be >= 0, got {noise_sigma}"
        )));
    }
    let mut placed = Vec::with_capacity(truth.len());
    for t in truth {
        let model = models
            .get(&t.model_id)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown model {:?}", t.model_id)))?;
        placed.push((t.model_id.as_str(), &model.mesh, t.pose));
    }
    check_in_frustum(&placed, camera)?;

    let mut scene: Vec<(&TriMesh, RigidPose2D)> = placed.iter().map(|(_, m, p)| (*m, *p)).collect();
    scene.extend(table.map(|t| (t, RigidPose2D::identity())));
    let clean = depth_to_cloud(&render_depth(&scene, camera));
    let observed = if noise_sigma == 0.0 {
        clean
    } else {
        let normal =
            Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noisy = clean
            .into_points()
            .into_iter()
            .map(|p| {
                let dx = normal.sample(&mut rng);
                let dy = normal.sample(&mut rng);
                let dz = normal.sample(&mut rng);
                Point3::new(p.x + dx, p.y + dy, p.z + dz)
            })
            .collect();
        PointCloud::world(noisy)?
    };
    Ok(GroundTruthScene {
        observed,
        camera: camera.clone(),
        truth: truth.to_vec(),
        noise_sigma,
        seed,
    })
}

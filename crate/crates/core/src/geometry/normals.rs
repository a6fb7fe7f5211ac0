use nalgebra::{Matrix3, Vector3};

use super::SpatialIndex;

/// Unit surface normal at each indexed point from the scatter of its
/// neighbors within `radius`: the eigenvector of the smallest eigenvalue.
/// Points with fewer than `min_neighbors` neighbors (itself included) get
/// `None`. The sign of a normal is arbitrary.
pub fn estimate_normals(
    index: &SpatialIndex,
    radius: f64,
    min_neighbors: usize,
) -> Vec<Option<Vector3<f64>>> {
    let pts = index.points();
    pts.iter()
        .map(|p| {
            let near = index.within_radius(p, radius);
            if near.len() < min_neighbors.max(3) {
                return None;
            }
            let n = near.len() as f64;
            let mean = near
                .iter()
                .fold(Vector3::zeros(), |acc, &i| acc + pts[i].coords)
                / n;
            let mut scatter = Matrix3::zeros();
            for &i in &near {
                let d = pts[i].coords - mean;
                scatter += d * d.transpose();
            }
            let eig = scatter.symmetric_eigen();
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            // a line-like neighborhood has no defined normal
            if eig.eigenvalues[order[1]] <= 1e-12 {
                return None;
            }
            Some(eig.eigenvectors.column(order[0]).normalize())
        })
        .collect()
}

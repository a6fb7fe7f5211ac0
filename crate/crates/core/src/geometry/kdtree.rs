use super::{Point3, PointCloud};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u8,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Exact nearest-neighbor index (k-d tree) over a fixed set of points.
///
/// Distances are compared as squared Euclidean norms; a point at distance
/// exactly `delta` counts as within `delta`. Ties on distance resolve to the
/// lowest original point index.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: Vec<Point3>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

#[inline]
pub(crate) fn sq_dist(a: &Point3, b: &Point3) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dz = a.z - b.z;
    dx * dx + dy * dy + dz * dz
}

#[inline]
fn coord(p: &Point3, axis: u8) -> f64 {
    match axis {
        0 => p.x,
        1 => p.y,
        _ => p.z,
    }
}

impl SpatialIndex {
    pub fn new(cloud: &PointCloud) -> Self {
        Self::from_points(cloud.points().to_vec())
    }

    pub fn from_points(points: Vec<Point3>) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::new();
        if !points.is_empty() {
            build(&points, &mut order, 0, points.len(), &mut nodes);
        }
        Self {
            points,
            order,
            nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Closest point as `(index, squared distance)`.
    pub fn nearest(&self, p: &Point3) -> Option<(usize, f64)> {
        self.nearest_bounded(p, f64::INFINITY)
    }

    /// Closest point no farther than `radius`.
    pub fn nearest_in_radius(&self, p: &Point3, radius: f64) -> Option<(usize, f64)> {
        self.nearest_bounded(p, radius * radius)
    }

    /// True iff some indexed point lies within `delta` of `p`.
    pub fn nearest_within(&self, p: &Point3, delta: f64) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        self.any_within(0, p, delta * delta)
    }

    /// Indices of every point within `radius` of `p`, ascending.
    pub fn within_radius(&self, p: &Point3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.nodes.is_empty() {
            self.collect_within(0, p, radius * radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn collect_within(&self, node: u32, p: &Point3, max_sq: f64, out: &mut Vec<usize>) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => out.extend(
                self.order[start as usize..end as usize]
                    .iter()
                    .filter(|&&i| sq_dist(p, &self.points[i as usize]) <= max_sq)
                    .map(|&i| i as usize),
            ),
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = coord(p, axis) - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.collect_within(near, p, max_sq, out);
                if diff * diff <= max_sq {
                    self.collect_within(far, p, max_sq, out);
                }
            }
        }
    }

    fn nearest_bounded(&self, p: &Point3, max_sq: f64) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (u32::MAX, max_sq);
        self.search(0, p, &mut best);
        (best.0 != u32::MAX).then_some((best.0 as usize, best.1))
    }

    fn search(&self, node: u32, p: &Point3, best: &mut (u32, f64)) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    let d = sq_dist(p, &self.points[i as usize]);
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = coord(p, axis) - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, p, best);
                // `<=` keeps equal-distance candidates reachable for the index tie-break
                if diff * diff <= best.1 {
                    self.search(far, p, best);
                }
            }
        }
    }

    fn any_within(&self, node: u32, p: &Point3, max_sq: f64) -> bool {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => self.order[start as usize..end as usize]
                .iter()
                .any(|&i| sq_dist(p, &self.points[i as usize]) <= max_sq),
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = coord(p, axis) - value;
                let (near, far) = if diff <= 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.any_within(near, p, max_sq)
                    || (diff * diff <= max_sq && self.any_within(far, p, max_sq))
            }
        }
    }
}

fn build(
    points: &[Point3],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let id = nodes.len() as u32;
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: start as u32,
            end: end as u32,
        });
        return id;
    }
    let slice = &mut order[start..end];
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &i in slice.iter() {
        let p = &points[i as usize];
        for (a, v) in [p.x, p.y, p.z].into_iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    let axis = (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0) as u8;
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        coord(&points[a as usize], axis)
            .total_cmp(&coord(&points[b as usize], axis))
            .then(a.cmp(&b))
    });
    let value = coord(&points[slice[mid] as usize], axis);
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let left = build(points, order, start, start + mid, nodes);
    let right = build(points, order, start + mid, end, nodes);
    nodes[id as usize] = Node::Split {
        axis,
        value,
        left,
        right,
    };
    id
}

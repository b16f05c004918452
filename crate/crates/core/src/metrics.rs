//! Chamfer and Hausdorff distances between point sets, and the sampled
//! mesh-vs-mesh evaluation built on them.

use thiserror::Error;

use crate::fmt::sig6;
use crate::mesh::{sample_surface, Mesh, MeshError, PointSet};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub chamfer: f64,
    pub hausdorff: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl MetricReport {
    /// `<id> chamfer=<g> hausdorff=<g> n=<int> seed=<int>`.
    pub fn line(&self, id: &str) -> String {
        format!(
            "{id} chamfer={} hausdorff={} n={} seed={}",
            sig6(self.chamfer),
            sig6(self.hausdorff),
            self.sample_count,
            self.seed
        )
    }
}

#[inline]
fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    dx * dx + dy * dy + dz * dz
}

/// Static 3-d tree over borrowed points, median split cycling x, y, z.
pub struct KdTree<'a> {
    points: &'a [[f64; 3]],
    order: Vec<u32>,
}

impl<'a> KdTree<'a> {
    pub fn new(points: &'a [[f64; 3]]) -> Self {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        build(points, &mut order, 0);
        Self { points, order }
    }

    /// Squared distance from `q` to the closest point; infinite when empty.
    pub fn nearest_dist2(&self, q: &[f64; 3]) -> f64 {
        let mut best = f64::INFINITY;
        self.search(q, 0, self.order.len(), 0, &mut best);
        best
    }

    fn search(&self, q: &[f64; 3], lo: usize, hi: usize, depth: usize, best: &mut f64) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = &self.points[self.order[mid] as usize];
        let d = dist2(q, p);
        if d < *best {
            *best = d;
        }
        let axis = depth % 3;
        let diff = q[axis] - p[axis];
        let (near, far) = if diff < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, depth + 1, best);
        // Points across the plane are at least |diff| away, and rounding is
        // monotone, so this prune never skips a strictly closer point.
        if diff * diff < *best {
            self.search(q, far.0, far.1, depth + 1, best);
        }
    }
}

fn build(points: &[[f64; 3]], order: &mut [u32], depth: usize) {
    if order.len() <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis].total_cmp(&points[b as usize][axis])
    });
    let (left, right) = order.split_at_mut(mid);
    build(points, left, depth + 1);
    build(points, &mut right[1..], depth + 1);
}

/// Nearest-neighbour distance from each point of `from` into `to`, in order.
fn directed(from: &[[f64; 3]], to: &[[f64; 3]]) -> Vec<f64> {
    let tree = KdTree::new(to);
    from.iter().map(|p| tree.nearest_dist2(p).sqrt()).collect()
}

fn check(a: &PointSet, b: &PointSet) -> Result<(), MetricsError> {
    if a.is_empty() || b.is_empty() {
        return Err(MetricsError::Domain(
            "distance to an empty point set".into(),
        ));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Symmetric Chamfer distance: the average of the two directed mean
/// nearest-neighbour distances (Euclidean, not squared).
pub fn chamfer(a: &PointSet, b: &PointSet) -> Result<f64, MetricsError> {
    check(a, b)?;
    Ok(0.5 * (mean(&directed(&a.points, &b.points)) + mean(&directed(&b.points, &a.points))))
}

pub fn hausdorff(a: &PointSet, b: &PointSet) -> Result<f64, MetricsError> {
    check(a, b)?;
    Ok(max(&directed(&a.points, &b.points)).max(max(&directed(&b.points, &a.points))))
}

/// Both metrics from one pair of nearest-neighbour sweeps.
pub fn chamfer_hausdorff(a: &PointSet, b: &PointSet) -> Result<(f64, f64), MetricsError> {
    check(a, b)?;
    let ab = directed(&a.points, &b.points);
    let ba = directed(&b.points, &a.points);
    Ok((0.5 * (mean(&ab) + mean(&ba)), max(&ab).max(max(&ba))))
}

/// Samples `n` area-weighted points from each mesh with the same seed and
/// compares them.
pub fn evaluate_pair(
    gt: &Mesh,
    gen: &Mesh,
    n: usize,
    seed: u64,
) -> Result<MetricReport, MetricsError> {
    let a = sample_surface(gt, n, n, seed)?;
    let b = sample_surface(gen, n, n, seed)?;
    let (chamfer, hausdorff) = chamfer_hausdorff(&a, &b)?;
    Ok(MetricReport {
        chamfer,
        hausdorff,
        sample_count: n,
        seed,
    })
}

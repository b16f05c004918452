use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Mesh, MeshError};

/// Points sampled from a surface, tagged with the seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 3]>, seed: u64) -> Self {
        Self { points, seed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn triangle_area([a, b, c]: [[f64; 3]; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let n = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

/// Total surface area in the mesh's own units.
pub fn mesh_area(mesh: &Mesh) -> f64 {
    (0..mesh.faces().len())
        .map(|f| triangle_area(mesh.triangle(f)))
        .sum()
}

/// Draws `n_dense` area-weighted uniform surface points, then keeps a uniform
/// random subset of `n_select` of them (partial Fisher-Yates). Fully
/// determined by `seed`.
pub fn sample_surface(
    mesh: &Mesh,
    n_dense: usize,
    n_select: usize,
    seed: u64,
) -> Result<PointSet, MeshError> {
    if n_select > n_dense {
        return Err(MeshError::Domain(format!(
            "cannot select {n_select} of {n_dense} points"
        )));
    }
    let mut cumulative = Vec::with_capacity(mesh.faces().len());
    let mut total = 0.0;
    for f in 0..mesh.faces().len() {
        total += triangle_area(mesh.triangle(f));
        cumulative.push(total);
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(MeshError::Degenerate(
            "mesh has no face with positive area".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<[f64; 3]> = (0..n_dense)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let f = cumulative
                .partition_point(|&c| c <= u)
                .min(cumulative.len() - 1);
            let [a, b, c] = mesh.triangle(f);
            let s = rng.random::<f64>().sqrt();
            let t = rng.random::<f64>();
            let (wa, wb, wc) = (1.0 - s, s * (1.0 - t), s * t);
            std::array::from_fn(|k| wa * a[k] + wb * b[k] + wc * c[k])
        })
        .collect();

    for i in 0..n_select {
        let j = rng.random_range(i..n_dense);
        points.swap(i, j);
    }
    points.truncate(n_select);
    Ok(PointSet::new(points, seed))
}

use super::{Mesh, MeshError};

/// Affine map `c' = (c + translation) * scale` into the unit cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationTransform {
    pub translation: [f64; 3],
    pub scale: f64,
}

impl NormalizationTransform {
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| ((p[a] + self.translation[a]) * self.scale).clamp(0.0, 1.0))
    }

    pub fn invert(&self, p: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| p[a] / self.scale - self.translation[a])
    }
}

/// Scales the mesh uniformly so its longest bounding-box edge spans `[0, 1]`,
/// centering the shorter axes.
pub fn normalize(mesh: &Mesh) -> Result<(Mesh, NormalizationTransform), MeshError> {
    let (lo, hi) = mesh
        .bounds()
        .ok_or_else(|| MeshError::Degenerate("mesh has no vertices".into()))?;
    let extents: [f64; 3] = std::array::from_fn(|a| hi[a] - lo[a]);
    let extent = extents.iter().copied().fold(0.0, f64::max);
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(MeshError::Degenerate(
            "bounding box has zero (or non-finite) extent".into(),
        ));
    }
    let transform = NormalizationTransform {
        translation: std::array::from_fn(|a| (extent - extents[a]) / 2.0 - lo[a]),
        scale: 1.0 / extent,
    };
    let vertices = mesh
        .vertices()
        .iter()
        .map(|&p| transform.apply(p))
        .collect();
    Ok((mesh.with_vertices(vertices), transform))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Axis {
    X,
    Y,
    #[default]
    Z,
}

/// Rotates by `k * 90` degrees (counter-clockwise looking down `axis`) about
/// the bounding-box center. Face indices are untouched.
pub fn rotate90(mesh: &Mesh, axis: Axis, k: u8) -> Mesh {
    let k = k % 4;
    let Some((lo, hi)) = mesh.bounds() else {
        return mesh.clone();
    };
    if k == 0 {
        return mesh.clone();
    }
    // (u, v) is the plane rotated; u -> v is the positive quarter turn.
    let (u, v) = match axis {
        Axis::X => (1, 2),
        Axis::Y => (2, 0),
        Axis::Z => (0, 1),
    };
    let cu = (lo[u] + hi[u]) / 2.0;
    let cv = (lo[v] + hi[v]) / 2.0;
    let vertices = mesh
        .vertices()
        .iter()
        .map(|&p| {
            let (du, dv) = (p[u] - cu, p[v] - cv);
            let (ru, rv) = match k {
                1 => (-dv, du),
                2 => (-du, -dv),
                _ => (dv, -du),
            };
            let mut q = p;
            q[u] = cu + ru;
            q[v] = cv + rv;
            q
        })
        .collect();
    mesh.with_vertices(vertices)
}

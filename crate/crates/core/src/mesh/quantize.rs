use std::collections::HashMap;

use super::{Mesh, MeshError, QuantizedMesh};

/// What [`quantize`] merged or dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuantizeStats {
    pub merged_vertices: usize,
    pub dropped_faces: usize,
}

/// Snaps unit-cube coordinates onto the `r`-bin grid with
/// `q = clamp(floor(c * r), 0, r - 1)`, merging vertices that land in the same
/// cell and dropping faces that collapse.
pub fn quantize(mesh: &Mesh, resolution: u32) -> Result<QuantizedMesh, MeshError> {
    quantize_with_stats(mesh, resolution).map(|(q, _)| q)
}

pub fn quantize_with_stats(
    mesh: &Mesh,
    resolution: u32,
) -> Result<(QuantizedMesh, QuantizeStats), MeshError> {
    if resolution < 2 {
        return Err(MeshError::Domain(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let r = resolution as f64;
    let mut cells: HashMap<[u32; 3], u32> = HashMap::with_capacity(mesh.vertices().len());
    let mut vertices = Vec::new();
    let mut remap = Vec::with_capacity(mesh.vertices().len());
    for p in mesh.vertices() {
        if let Some(c) = p.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(MeshError::Domain(format!(
                "coordinate {c} outside [0, 1]; normalize first"
            )));
        }
        let q = p.map(|c| ((c * r).floor() as u32).min(resolution - 1));
        let id = *cells.entry(q).or_insert_with(|| {
            vertices.push(q);
            vertices.len() as u32 - 1
        });
        remap.push(id);
    }
    let mut faces = Vec::with_capacity(mesh.faces().len());
    for f in mesh.faces() {
        let g = f.map(|v| remap[v as usize]);
        if g[0] != g[1] && g[1] != g[2] && g[0] != g[2] {
            faces.push(g);
        }
    }
    let stats = QuantizeStats {
        merged_vertices: mesh.vertices().len() - vertices.len(),
        dropped_faces: mesh.faces().len() - faces.len(),
    };
    Ok((
        QuantizedMesh::new_unchecked(resolution, vertices, faces),
        stats,
    ))
}

/// Maps each grid cell back to its center, `(q + 0.5) / r`.
pub fn dequantize(qmesh: &QuantizedMesh) -> Mesh {
    let r = qmesh.resolution() as f64;
    let vertices = qmesh
        .vertices()
        .iter()
        .map(|q| q.map(|c| (c as f64 + 0.5) / r))
        .collect();
    Mesh {
        vertices,
        faces: qmesh.faces().to_vec(),
    }
}

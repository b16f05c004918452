//! Mesh ingestion, normalization, quantization, augmentation and surface
//! sampling.

mod io;
mod quantize;
mod sample;
pub mod shapes;
mod transform;

pub use io::{load_mesh, write_obj, MeshFormat};
pub use quantize::{dequantize, quantize, quantize_with_stats, QuantizeStats};
pub use sample::{mesh_area, sample_surface, triangle_area, PointSet};
pub use transform::{normalize, rotate90, Axis, NormalizationTransform};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
}

/// A triangle mesh with real-valued vertex positions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[u32; 3]>,
}

impl Mesh {
    /// Builds a mesh, checking that every face index refers to a vertex.
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        check_faces(vertices.len(), &faces)?;
        Ok(Self { vertices, faces })
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    /// Positions of the three corners of face `f`.
    pub fn triangle(&self, f: usize) -> [[f64; 3]; 3] {
        self.faces[f].map(|v| self.vertices[v as usize])
    }

    /// Axis-aligned bounding box as `(min, max)`, or `None` for an empty mesh.
    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = *self.vertices.first()?;
        Some(
            self.vertices
                .iter()
                .fold((first, first), |(mut lo, mut hi), v| {
                    for a in 0..3 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                    (lo, hi)
                }),
        )
    }

    pub(crate) fn with_vertices(&self, vertices: Vec<[f64; 3]>) -> Self {
        debug_assert_eq!(vertices.len(), self.vertices.len());
        Self {
            vertices,
            faces: self.faces.clone(),
        }
    }
}

/// A mesh on the integer grid `[0, r-1]^3` with unique vertices and no
/// collapsed faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedMesh {
    resolution: u32,
    vertices: Vec<[u32; 3]>,
    faces: Vec<[u32; 3]>,
}

impl QuantizedMesh {
    pub fn new(
        resolution: u32,
        vertices: Vec<[u32; 3]>,
        faces: Vec<[u32; 3]>,
    ) -> Result<Self, MeshError> {
        if resolution < 2 {
            return Err(MeshError::Domain(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.iter().any(|&c| c >= resolution)) {
            return Err(MeshError::Domain(format!(
                "vertex {v:?} outside [0, {}]",
                resolution - 1
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(vertices.len());
        if let Some(v) = vertices.iter().find(|v| !seen.insert(**v)) {
            return Err(MeshError::Structural(format!("duplicate vertex {v:?}")));
        }
        check_faces(vertices.len(), &faces)?;
        if let Some(f) = faces
            .iter()
            .find(|f| f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
        {
            return Err(MeshError::Structural(format!("degenerate face {f:?}")));
        }
        Ok(Self {
            resolution,
            vertices,
            faces,
        })
    }

    /// Caller guarantees the invariants checked by [`QuantizedMesh::new`].
    pub(crate) fn new_unchecked(
        resolution: u32,
        vertices: Vec<[u32; 3]>,
        faces: Vec<[u32; 3]>,
    ) -> Self {
        Self {
            resolution,
            vertices,
            faces,
        }
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn vertices(&self) -> &[[u32; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    /// Faces as coordinate triples, each rotated so its smallest vertex comes
    /// first, then sorted. Two meshes with equal canonical face lists have the
    /// same faces up to cyclic rotation, regardless of vertex numbering.
    pub fn canonical_faces(&self) -> Vec<[[u32; 3]; 3]> {
        let mut out: Vec<_> = self
            .faces
            .iter()
            .map(|f| canonical_rotation(f.map(|v| self.vertices[v as usize])))
            .collect();
        out.sort_unstable();
        out
    }

    /// Sorted, deduplicated positions of vertices referenced by some face.
    pub fn referenced_vertices(&self) -> Vec<[u32; 3]> {
        let mut out: Vec<_> = self
            .faces
            .iter()
            .flatten()
            .map(|&v| self.vertices[v as usize])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Rotates a triangle so its lexicographically smallest corner is first,
/// keeping the winding.
pub fn canonical_rotation<T: Ord + Copy>(tri: [T; 3]) -> [T; 3] {
    let first = (0..3).min_by_key(|&i| tri[i]).unwrap_or(0);
    [tri[first], tri[(first + 1) % 3], tri[(first + 2) % 3]]
}

fn check_faces(vertex_count: usize, faces: &[[u32; 3]]) -> Result<(), MeshError> {
    for (n, f) in faces.iter().enumerate() {
        if let Some(&bad) = f.iter().find(|&&v| v as usize >= vertex_count) {
            return Err(MeshError::Structural(format!(
                "face {n} references vertex {bad} but the mesh has {vertex_count} vertices"
            )));
        }
    }
    Ok(())
}

use std::collections::HashMap;

use crate::mesh::{canonical_rotation, QuantizedMesh};

/// A triangle fan: faces `(center, ring[t], ring[t + 1])`.
///
/// Ring vertices are pairwise distinct, except that a fan closing all the way
/// around its center repeats the first ring vertex at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Patch {
    pub center: [u32; 3],
    pub ring: Vec<[u32; 3]>,
}

impl Patch {
    pub fn face_count(&self) -> usize {
        self.ring.len().saturating_sub(1)
    }

    pub fn triangles(&self) -> impl Iterator<Item = [[u32; 3]; 3]> + '_ {
        self.ring.windows(2).map(|w| [self.center, w[0], w[1]])
    }
}

struct Adjacency {
    /// CSR offsets into `incident`.
    offsets: Vec<usize>,
    incident: Vec<u32>,
    /// Faces per undirected edge, over the whole mesh.
    edge_faces: HashMap<(u32, u32), u32>,
}

impl Adjacency {
    fn new(vertex_count: usize, faces: &[[u32; 3]]) -> Self {
        let mut offsets = vec![0usize; vertex_count + 1];
        for f in faces {
            for &v in f {
                offsets[v as usize + 1] += 1;
            }
        }
        for v in 0..vertex_count {
            offsets[v + 1] += offsets[v];
        }
        let mut fill = offsets.clone();
        let mut incident = vec![0u32; offsets[vertex_count]];
        let mut edge_faces = HashMap::with_capacity(faces.len() * 3 / 2);
        for (n, f) in faces.iter().enumerate() {
            for e in 0..3 {
                let v = f[e] as usize;
                incident[fill[v]] = n as u32;
                fill[v] += 1;
                *edge_faces
                    .entry(edge_key(f[e], f[(e + 1) % 3]))
                    .or_insert(0) += 1;
            }
        }
        Self {
            offsets,
            incident,
            edge_faces,
        }
    }

    fn faces_of(&self, v: u32) -> &[u32] {
        &self.incident[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    fn is_manifold_edge(&self, a: u32, b: u32) -> bool {
        self.edge_faces.get(&edge_key(a, b)).copied().unwrap_or(0) <= 2
    }
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// `face` rotated so `v` comes first; `v` must be a corner.
fn rotate_to(face: [u32; 3], v: u32) -> [u32; 3] {
    match face.iter().position(|&x| x == v) {
        Some(0) => face,
        Some(1) => [face[1], face[2], face[0]],
        _ => [face[2], face[0], face[1]],
    }
}

/// Partitions the faces into triangle fans.
///
/// Faces are visited in canonical order (each face rotated to start at its
/// smallest coordinate, then sorted). The first unvisited face seeds a patch
/// whose center is the seed corner touching the most unvisited faces, ties
/// going to the smallest coordinate. The fan then grows forward along the
/// seed's winding and afterwards backward, stopping at visited faces,
/// boundaries, non-manifold edges, or when it wraps around to its start.
pub fn build_patches(qmesh: &QuantizedMesh) -> Vec<Patch> {
    let vertices = qmesh.vertices();
    let faces = qmesh.faces();
    let adj = Adjacency::new(vertices.len(), faces);
    let coords = |f: usize| faces[f].map(|v| vertices[v as usize]);

    let mut order: Vec<u32> = (0..faces.len() as u32).collect();
    order.sort_by_cached_key(|&f| canonical_rotation(coords(f as usize)));

    let mut unvisited_degree: Vec<u32> = (0..vertices.len() as u32)
        .map(|v| adj.faces_of(v).len() as u32)
        .collect();
    let mut visited = vec![false; faces.len()];
    // Stamp of the patch a vertex currently sits in the ring of.
    let mut ring_stamp = vec![usize::MAX; vertices.len()];
    let mut patches = Vec::new();

    let take = |f: u32, visited: &mut [bool], degree: &mut [u32]| {
        visited[f as usize] = true;
        for v in faces[f as usize] {
            degree[v as usize] -= 1;
        }
    };

    for &seed in &order {
        if visited[seed as usize] {
            continue;
        }
        let stamp = patches.len();
        let center = *faces[seed as usize]
            .iter()
            .min_by_key(|&&v| {
                (
                    std::cmp::Reverse(unvisited_degree[v as usize]),
                    vertices[v as usize],
                )
            })
            .expect("three corners");
        let [_, p1, p2] = rotate_to(faces[seed as usize], center);
        take(seed, &mut visited, &mut unvisited_degree);
        let mut ring = std::collections::VecDeque::from([p1, p2]);
        ring_stamp[p1 as usize] = stamp;
        ring_stamp[p2 as usize] = stamp;

        // Unique unvisited face around `center` matching `pick`, if any.
        let find = |visited: &[bool], pick: &dyn Fn([u32; 3]) -> Option<u32>| {
            let mut found = None;
            for &g in adj.faces_of(center) {
                if visited[g as usize] {
                    continue;
                }
                if let Some(x) = pick(rotate_to(faces[g as usize], center)) {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((g, x));
                }
            }
            found
        };

        let mut closed = false;
        loop {
            let last = *ring.back().expect("non-empty ring");
            if !adj.is_manifold_edge(center, last) {
                break;
            }
            let Some((g, x)) = find(&visited, &|[_, a, b]| (a == last).then_some(b)) else {
                break;
            };
            if x == ring[0] {
                take(g, &mut visited, &mut unvisited_degree);
                ring.push_back(x);
                closed = true;
                break;
            }
            if ring_stamp[x as usize] == stamp {
                break;
            }
            take(g, &mut visited, &mut unvisited_degree);
            ring_stamp[x as usize] = stamp;
            ring.push_back(x);
        }
        if !closed {
            loop {
                let first = ring[0];
                if !adj.is_manifold_edge(center, first) {
                    break;
                }
                let Some((g, x)) = find(&visited, &|[_, a, b]| (b == first).then_some(a)) else {
                    break;
                };
                if ring_stamp[x as usize] == stamp {
                    break;
                }
                take(g, &mut visited, &mut unvisited_degree);
                ring_stamp[x as usize] = stamp;
                ring.push_front(x);
            }
        }

        patches.push(Patch {
            center: vertices[center as usize],
            ring: ring.into_iter().map(|v| vertices[v as usize]).collect(),
        });
    }
    patches
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{normalize, quantize, shapes};

    fn grid(mesh: &crate::Mesh, r: u32) -> QuantizedMesh {
        quantize(&normalize(mesh).unwrap().0, r).unwrap()
    }

    fn covered(patches: &[Patch]) -> Vec<[[u32; 3]; 3]> {
        let mut out: Vec<_> = patches
            .iter()
            .flat_map(|p| p.triangles().map(canonical_rotation))
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn single_triangle() {
        let q = QuantizedMesh::new(512, vec![[0, 0, 0], [0, 0, 1], [0, 1, 0]], vec![[0, 1, 2]])
            .unwrap();
        let p = build_patches(&q);
        assert_eq!(
            p,
            vec![Patch {
                center: [0, 0, 0],
                ring: vec![[0, 0, 1], [0, 1, 0]]
            }]
        );
    }

    #[test]
    fn closed_umbrella_is_one_patch() {
        let q = grid(&shapes::fan(6, true), 512);
        let p = build_patches(&q);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].ring.len(), 7);
        assert_eq!(p[0].ring[0], p[0].ring[6]);
        assert_eq!(p[0].center, q.vertices()[0]);
        assert_eq!(covered(&p), q.canonical_faces());
    }

    #[test]
    fn open_fan_grows_backward() {
        // Seed face is not the first spoke in winding order, so both
        // directions are needed to collect the whole fan.
        let q = QuantizedMesh::new(
            64,
            vec![[10, 10, 0], [0, 20, 0], [0, 10, 0], [0, 0, 0], [20, 0, 0]],
            vec![[0, 1, 2], [0, 2, 3], [0, 3, 4]],
        )
        .unwrap();
        let p = build_patches(&q);
        assert_eq!(p.len(), 1, "{p:?}");
        assert_eq!(p[0].center, [10, 10, 0]);
        assert_eq!(
            p[0].ring,
            vec![[0, 20, 0], [0, 10, 0], [0, 0, 0], [20, 0, 0]]
        );
    }

    #[test]
    fn disconnected_triangles() {
        let q = QuantizedMesh::new(
            16,
            vec![
                [0, 0, 0],
                [1, 0, 0],
                [0, 1, 0],
                [9, 9, 9],
                [9, 9, 8],
                [9, 8, 9],
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        assert_eq!(build_patches(&q).len(), 2);
    }

    #[test]
    fn non_manifold_edge_stops_growth() {
        // Three faces share edge (0,1).
        let q = QuantizedMesh::new(
            16,
            vec![[0, 0, 0], [4, 0, 0], [2, 4, 0], [2, 0, 4], [2, 0, 12]],
            vec![[0, 1, 2], [1, 0, 3], [1, 0, 4]],
        )
        .unwrap();
        let p = build_patches(&q);
        assert_eq!(covered(&p), q.canonical_faces());
        assert!(p.iter().all(|p| p.face_count() == 1));
    }

    #[test]
    fn shapes_are_partitioned() {
        for m in [shapes::icosphere(2), shapes::torus(12, 7, 1.0, 0.3)] {
            let q = grid(&m, 512);
            let p = build_patches(&q);
            assert_eq!(covered(&p), q.canonical_faces());
            for patch in &p {
                let mut ring = patch.ring.clone();
                if ring.len() > 2 && ring.first() == ring.last() {
                    ring.pop();
                }
                let n = ring.len();
                ring.sort_unstable();
                ring.dedup();
                assert_eq!(ring.len(), n, "ring repeats a vertex");
                assert!(!ring.contains(&patch.center));
            }
        }
    }
}

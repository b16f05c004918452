//! Test corpus generators and brute-force oracles shared by the
//! integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::HashMap;

use fantok_core::mesh::shapes;
use fantok_core::{normalize, quantize, rotate90, Axis, Mesh, QuantizedMesh};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_grid(mesh: &Mesh, r: u32) -> QuantizedMesh {
    quantize(&normalize(mesh).expect("non-degenerate").0, r).expect("unit cube input")
}

struct Builder {
    index: HashMap<[u32; 3], u32>,
    vertices: Vec<[u32; 3]>,
    faces: Vec<[u32; 3]>,
}

impl Builder {
    fn new() -> Self {
        Self {
            index: HashMap::new(),
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    fn vertex(&mut self, q: [u32; 3]) -> u32 {
        *self.index.entry(q).or_insert_with(|| {
            self.vertices.push(q);
            self.vertices.len() as u32 - 1
        })
    }

    fn face(&mut self, a: [u32; 3], b: [u32; 3], c: [u32; 3]) {
        if a != b && b != c && a != c {
            let f = [self.vertex(a), self.vertex(b), self.vertex(c)];
            self.faces.push(f);
        }
    }

    fn finish(self, r: u32) -> QuantizedMesh {
        QuantizedMesh::new(r, self.vertices, self.faces).expect("builder keeps invariants")
    }
}

/// A few triangle fans scattered on the grid. Fans may touch each other,
/// share vertices, or repeat faces.
pub fn random_fan_complex(seed: u64, r: u32) -> QuantizedMesh {
    let mut rng = rng(seed);
    let mut b = Builder::new();
    let fans = rng.random_range(1..=6);
    for _ in 0..fans {
        let spread = rng.random_range(1..=(r / 4).max(2)) as i64;
        let center: [i64; 3] = std::array::from_fn(|_| rng.random_range(0..r) as i64);
        let spokes = rng.random_range(3..=10);
        let closed = rng.random_bool(0.5);
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        let ring: Vec<[u32; 3]> = (0..spokes)
            .map(|s| {
                let a = phase + std::f64::consts::TAU * s as f64 / spokes as f64;
                let off = [
                    (a.cos() * spread as f64).round() as i64,
                    (a.sin() * spread as f64).round() as i64,
                    rng.random_range(-spread..=spread) / 2,
                ];
                std::array::from_fn(|k| (center[k] + off[k]).clamp(0, r as i64 - 1) as u32)
            })
            .collect();
        let c = center.map(|v| v as u32);
        let n = if closed { spokes } else { spokes - 1 };
        for t in 0..n {
            b.face(c, ring[t], ring[(t + 1) % spokes]);
        }
    }
    b.finish(r)
}

/// Random triangles over a tiny lattice: lots of shared edges, flipped
/// windings and non-manifold configurations.
pub fn random_soup(seed: u64, r: u32, lattice: u32, faces: usize) -> QuantizedMesh {
    let mut rng = rng(seed);
    let mut b = Builder::new();
    let step = (r / lattice).max(1);
    let point = |rng: &mut ChaCha8Rng| -> [u32; 3] {
        std::array::from_fn(|_| (rng.random_range(0..lattice) * step).min(r - 1))
    };
    for _ in 0..faces {
        let (p, q, s) = (point(&mut rng), point(&mut rng), point(&mut rng));
        b.face(p, q, s);
    }
    b.finish(r)
}

/// Two-triangle configurations on a small grid.
pub fn two_triangle_cases(r: u32) -> Vec<(String, QuantizedMesh)> {
    let p = |x: u32, y: u32, z: u32| [x.min(r - 1), y.min(r - 1), z.min(r - 1)];
    let (o, a, b, c, d) = (p(0, 0, 0), p(5, 0, 0), p(0, 5, 0), p(5, 5, 0), p(9, 9, 9));
    let cases: Vec<(&str, Vec<[[u32; 3]; 3]>)> = vec![
        ("shared-edge", vec![[o, a, b], [a, c, b]]),
        ("shared-edge-flipped", vec![[o, a, b], [a, b, c]]),
        ("shared-vertex", vec![[o, a, b], [o, c, d]]),
        ("disjoint", vec![[o, a, b], [c, d, p(9, 0, 9)]]),
        ("duplicate", vec![[o, a, b], [o, a, b]]),
        ("opposite-copies", vec![[o, a, b], [o, b, a]]),
        ("fan-pair", vec![[o, a, c], [o, c, b]]),
    ];
    cases
        .into_iter()
        .map(|(name, faces)| {
            let mut bld = Builder::new();
            for [x, y, z] in faces {
                bld.face(x, y, z);
            }
            (format!("two-triangle/{name}"), bld.finish(r))
        })
        .collect()
}

/// The acceptance corpus at resolution 512: icospheres up to 20480 faces,
/// tori, rotated copies, random fan complexes, triangle soups and
/// two-triangle cases.
pub fn corpus() -> Vec<(String, QuantizedMesh)> {
    let mut out = Vec::new();
    for s in 0..=5 {
        out.push((
            format!("icosphere/{s}"),
            to_grid(&shapes::icosphere(s), 512),
        ));
    }
    for s in 2..=4 {
        for k in 1..=3u8 {
            let m = rotate90(&shapes::icosphere(s), Axis::X, k);
            out.push((format!("icosphere/{s}/rot-x-{k}"), to_grid(&m, 512)));
        }
    }
    for (i, (rings, sides, minor)) in [
        (8, 3, 0.2),
        (12, 6, 0.3),
        (24, 12, 0.4),
        (48, 16, 0.25),
        (100, 50, 0.3),
        (64, 8, 0.7),
    ]
    .into_iter()
    .enumerate()
    {
        let t = shapes::torus(rings, sides, 1.0, minor);
        out.push((format!("torus/{i}"), to_grid(&t, 512)));
        out.push((
            format!("torus/{i}/rot-y-1"),
            to_grid(&rotate90(&t, Axis::Y, 1), 512),
        ));
    }
    for spokes in [3, 6, 17] {
        for closed in [false, true] {
            out.push((
                format!("fan/{spokes}/{closed}"),
                to_grid(&shapes::fan(spokes, closed), 512),
            ));
        }
    }
    for seed in 0..160 {
        out.push((format!("fan-complex/{seed}"), random_fan_complex(seed, 512)));
    }
    for seed in 0..30 {
        out.push((format!("soup/{seed}"), random_soup(1000 + seed, 512, 4, 40)));
    }
    out.extend(two_triangle_cases(512));
    out
}

/// O(n m) nearest-neighbour distances from each point of `from`.
pub fn brute_directed(from: &[[f64; 3]], to: &[[f64; 3]]) -> Vec<f64> {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| {
                    let (dx, dy, dz) = (p[0] - q[0], p[1] - q[1], p[2] - q[2]);
                    (dx * dx + dy * dy + dz * dz).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn brute_chamfer(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let ab = brute_directed(a, b);
    let ba = brute_directed(b, a);
    0.5 * (ab.iter().sum::<f64>() / ab.len() as f64 + ba.iter().sum::<f64>() / ba.len() as f64)
}

pub fn brute_hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    brute_directed(a, b)
        .into_iter()
        .chain(brute_directed(b, a))
        .fold(0.0, f64::max)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect()
}

//! Procedural meshes: icospheres, tori and triangle fans. All are consistently
//! wound counter-clockwise seen from outside.

use std::collections::HashMap;

use super::Mesh;

/// Unit icosphere with `20 * 4^subdivisions` faces.
pub fn icosphere(subdivisions: u32) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(unit)
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut mid = |a: u32, b: u32, vertices: &mut Vec<[f64; 3]>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (vertices[a as usize], vertices[b as usize]);
                vertices.push(unit(std::array::from_fn(|k| (p[k] + q[k]) / 2.0)));
                vertices.len() as u32 - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    Mesh::new(vertices, faces).expect("icosphere indices are in range")
}

fn unit(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    p.map(|c| c / n)
}

/// Torus around the Z axis with `2 * rings * sides` faces.
pub fn torus(rings: u32, sides: u32, major_radius: f64, minor_radius: f64) -> Mesh {
    assert!(
        rings >= 3 && sides >= 3,
        "torus needs at least 3 rings and sides"
    );
    let tau = std::f64::consts::TAU;
    let mut vertices = Vec::with_capacity((rings * sides) as usize);
    for i in 0..rings {
        let u = tau * i as f64 / rings as f64;
        for j in 0..sides {
            let v = tau * j as f64 / sides as f64;
            let w = major_radius + minor_radius * v.cos();
            vertices.push([w * u.cos(), w * u.sin(), minor_radius * v.sin()]);
        }
    }
    let id = |i: u32, j: u32| (i % rings) * sides + (j % sides);
    let mut faces = Vec::with_capacity((2 * rings * sides) as usize);
    for i in 0..rings {
        for j in 0..sides {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    Mesh::new(vertices, faces).expect("torus indices are in range")
}

/// Axis-aligned unit cube `[0, 1]^3`, two triangles per side.
pub fn cube() -> Mesh {
    let vertices = (0..8u32)
        .map(|c| std::array::from_fn(|a| (c >> a & 1) as f64))
        .collect();
    // Corner index bits are (x, y, z).
    let quads = [
        [0, 2, 3, 1], // z = 0
        [4, 5, 7, 6], // z = 1
        [0, 1, 5, 4], // y = 0
        [2, 6, 7, 3], // y = 1
        [0, 4, 6, 2], // x = 0
        [1, 3, 7, 5], // x = 1
    ];
    let faces = quads
        .iter()
        .flat_map(|&[a, b, c, d]| [[a, b, c], [a, c, d]])
        .collect();
    Mesh::new(vertices, faces).expect("cube indices are in range")
}

/// A hub at the origin with `spokes` rim vertices on the unit circle. A closed
/// fan has `spokes` faces, an open one `spokes - 1`.
pub fn fan(spokes: u32, closed: bool) -> Mesh {
    assert!(spokes >= 3, "fan needs at least 3 spokes");
    let tau = std::f64::consts::TAU;
    let mut vertices = vec![[0.0, 0.0, 0.0]];
    vertices.extend((0..spokes).map(|s| {
        let a = tau * s as f64 / spokes as f64;
        [a.cos(), a.sin(), 0.0]
    }));
    let n = if closed { spokes } else { spokes - 1 };
    let faces = (0..n).map(|s| [0, 1 + s, 1 + (s + 1) % spokes]).collect();
    Mesh::new(vertices, faces).expect("fan indices are in range")
}

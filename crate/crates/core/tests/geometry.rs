mod common;

use fantok_core::mesh::shapes;
use fantok_core::metrics::{chamfer, chamfer_hausdorff, evaluate_pair, hausdorff};
use fantok_core::{mesh_area, normalize, rotate90, sample_surface, Axis, Mesh, PointSet};
use proptest::prelude::*;

#[test]
fn area_weighted_face_choice() {
    // Areas 1 and 3.
    let m = Mesh::new(
        vec![
            [0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [10.0, 0.0, 0.0],
            [12.0, 0.0, 0.0],
            [10.0, 3.0, 0.0],
        ],
        vec![[0, 1, 2], [3, 4, 5]],
    )
    .unwrap();
    assert_eq!(mesh_area(&m), 4.0);
    let ps = sample_surface(&m, 100_000, 100_000, 5).unwrap();
    let large = ps.points.iter().filter(|p| p[0] >= 10.0).count() as f64 / 1e5;
    assert!((large - 0.75).abs() <= 0.01, "{large}");
}

#[test]
fn icosphere_area_near_sphere() {
    let area = mesh_area(&shapes::icosphere(5));
    let sphere = 4.0 * std::f64::consts::PI;
    assert!((area - sphere).abs() / sphere < 2e-3, "{area}");
}

#[test]
fn same_mesh_same_seed_is_zero() {
    let m = shapes::icosphere(3);
    let r = evaluate_pair(&m, &m, 1024, 7).unwrap();
    assert_eq!((r.chamfer, r.hausdorff), (0.0, 0.0));
    assert_eq!(r.line("ico"), "ico chamfer=0 hausdorff=0 n=1024 seed=7");
}

#[test]
fn same_mesh_different_seeds_is_small() {
    let m = shapes::icosphere(4);
    let a = sample_surface(&m, 1024, 1024, 1).unwrap();
    let b = sample_surface(&m, 1024, 1024, 2).unwrap();
    let (c, _) = chamfer_hausdorff(&a, &b).unwrap();
    let diagonal = 2.0 * 3f64.sqrt();
    assert!(c > 0.0 && c < diagonal / 10.0, "{c}");
}

#[test]
fn translation_dominates() {
    let cube = shapes::cube();
    let moved = Mesh::new(
        cube.vertices()
            .iter()
            .map(|p| [p[0] + 10.0, p[1], p[2]])
            .collect(),
        cube.faces().to_vec(),
    )
    .unwrap();
    let r = evaluate_pair(&cube, &moved, 1024, 3).unwrap();
    // Identical samples shifted by 10: nearest neighbours are at least 9 and
    // at most ~10 away.
    assert!((r.chamfer - 10.0).abs() < 0.5, "{r:?}");
    assert!((r.hausdorff - 10.0).abs() < 0.5, "{r:?}");
}

#[test]
fn degenerate_mesh_propagates() {
    let flat = Mesh::new(
        vec![[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]],
        vec![[0, 1, 2]],
    )
    .unwrap();
    assert!(evaluate_pair(&shapes::cube(), &flat, 16, 0).is_err());
}

fn points(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<[f64; 3]>> {
    proptest::collection::vec(proptest::array::uniform3(-5.0f64..5.0), n)
}

proptest! {
    #[test]
    fn metric_properties(a in points(1..60), b in points(1..60), c in points(1..60)) {
        let (a, b, c) = (PointSet::new(a, 0), PointSet::new(b, 0), PointSet::new(c, 0));
        prop_assert_eq!(chamfer(&a, &b).unwrap(), chamfer(&b, &a).unwrap());
        prop_assert_eq!(hausdorff(&a, &b).unwrap(), hausdorff(&b, &a).unwrap());
        prop_assert!(hausdorff(&a, &b).unwrap() >= chamfer(&a, &b).unwrap());
        prop_assert_eq!(chamfer(&a, &a).unwrap(), 0.0);
        let (ab, bc, ac) = (hausdorff(&a, &b).unwrap(), hausdorff(&b, &c).unwrap(), hausdorff(&a, &c).unwrap());
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn kd_tree_matches_brute_force(a in points(1..200), b in points(1..200)) {
        let (pa, pb) = (PointSet::new(a.clone(), 0), PointSet::new(b.clone(), 0));
        prop_assert_eq!(chamfer(&pa, &pb).unwrap(), common::brute_chamfer(&a, &b));
        prop_assert_eq!(hausdorff(&pa, &pb).unwrap(), common::brute_hausdorff(&a, &b));
    }

    #[test]
    fn normalization_bounds(v in points(2..40)) {
        let m = Mesh::new(v, vec![]).unwrap();
        let (lo, hi) = m.bounds().unwrap();
        prop_assume!((0..3).any(|a| hi[a] > lo[a]));
        let (n, t) = normalize(&m).unwrap();
        let (nlo, nhi) = n.bounds().unwrap();
        prop_assert!(nlo.iter().all(|&c| c >= 0.0) && nhi.iter().all(|&c| c <= 1.0));
        let longest = (0..3).max_by(|&x, &y| (hi[x] - lo[x]).total_cmp(&(hi[y] - lo[y]))).unwrap();
        prop_assert_eq!(nlo[longest], 0.0);
        prop_assert!(1.0 - nhi[longest] <= f64::EPSILON);
        for (p, q) in m.vertices().iter().zip(n.vertices()) {
            let back = t.invert(*q);
            for a in 0..3 {
                prop_assert!((back[a] - p[a]).abs() <= 1e-9 * (1.0 + p[a].abs()));
            }
        }
    }

    #[test]
    fn quarter_turns_compose_to_identity(v in points(1..30), axis in 0..3usize) {
        let axis = [Axis::X, Axis::Y, Axis::Z][axis];
        let m = Mesh::new(v, vec![]).unwrap();
        let mut r = m.clone();
        for _ in 0..4 {
            r = rotate90(&r, axis, 1);
        }
        for (p, q) in m.vertices().iter().zip(r.vertices()) {
            for a in 0..3 {
                prop_assert!((p[a] - q[a]).abs() <= 1e-12);
            }
        }
        let twice = rotate90(&rotate90(&m, axis, 2), axis, 2);
        for (p, q) in m.vertices().iter().zip(twice.vertices()) {
            for a in 0..3 {
                prop_assert!((p[a] - q[a]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn integer_quarter_turns_are_exact(v in proptest::collection::vec(proptest::array::uniform3(-100i32..100), 1..30), k in 1u8..3) {
        let m = Mesh::new(v.iter().map(|p| p.map(f64::from)).collect(), vec![]).unwrap();
        let mut r = m.clone();
        for _ in 0..(4 / k) {
            r = rotate90(&r, Axis::Z, k);
        }
        prop_assert_eq!(r, m);
    }

    #[test]
    fn sampling_is_reproducible(seed: u64) {
        let m = shapes::icosphere(1);
        let a = sample_surface(&m, 300, 100, seed).unwrap();
        prop_assert_eq!(a.len(), 100);
        prop_assert_eq!(a, sample_surface(&m, 300, 100, seed).unwrap());
    }
}

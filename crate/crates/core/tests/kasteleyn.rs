use hexdimer::kasteleyn::*;
use hexdimer::model::{enumerate_configs, oracle_partition, BoxShape};
use hexdimer::partition::log_z_macmahon;
use std::collections::HashSet;

fn shape(m: u32, n: u32, k: u32) -> BoxShape {
    BoxShape::new(m, n, k).unwrap()
}

#[test]
fn embedding_sizes() {
    let e = build_embedding(shape(1, 1, 1)).unwrap();
    assert_eq!(e.vertex_count(), 6);
    assert_eq!(e.edges.len(), 6);
    assert_eq!(build_embedding(shape(2, 1, 1)).unwrap().vertex_count(), 10);
    assert_eq!(build_embedding(shape(2, 2, 2)).unwrap().vertex_count(), 24);
    for (m, n, k) in [(3, 2, 1), (4, 3, 5)] {
        let e = build_embedding(shape(m, n, k)).unwrap();
        assert_eq!(e.vertex_count() as u32, 2 * (m * n + n * k + m * k));
        assert_eq!(e.white.len(), e.black.len());
    }
    assert!(build_embedding(BoxShape::infinite(2, 2).unwrap()).is_err());
}

#[test]
fn interior_faces_are_hexagons() {
    // An a x b x c hexagon has (ab + bc + ca) - (a + b + c) + 1 interior points.
    for (m, n, k) in [(1, 1, 1), (2, 2, 2), (3, 2, 4)] {
        let e = build_embedding(shape(m, n, k)).unwrap();
        let faces = e.interior_faces();
        assert_eq!(faces.len() as u32, m * n + n * k + k * m - m - n - k + 1);
        for (u, v) in faces {
            assert_eq!(e.face_edge_count(u, v), 6);
        }
    }
}

#[test]
fn brick_wall_positions() {
    let e = build_embedding(shape(2, 2, 2)).unwrap();
    for edge in &e.edges {
        let (wr, wi) = white_position(e.white[edge.white]);
        let (br, bi) = black_position(e.black[edge.black]);
        match edge.dir {
            Direction::Horizontal => assert_eq!((wr - br, wi - bi), (1, 0)),
            Direction::Down => assert_eq!((wr - br, wi - bi), (0, 1)),
            Direction::Up => assert_eq!((wr - br, wi - bi), (0, -1)),
        }
    }
}

#[test]
fn every_pile_is_a_perfect_matching() {
    for (m, n, k) in [(2, 2, 2), (3, 2, 3), (1, 3, 2)] {
        let s = shape(m, n, k);
        let e = build_embedding(s).unwrap();
        let mut seen = HashSet::new();
        for c in enumerate_configs(s).unwrap() {
            let matching = e.matching_of(&c).unwrap();
            let whites: HashSet<_> = matching.iter().map(|x| x.white).collect();
            let blacks: HashSet<_> = matching.iter().map(|x| x.black).collect();
            assert_eq!(whites.len(), e.white.len());
            assert_eq!(blacks.len(), e.black.len());
            let horizontal = matching.iter().filter(|x| x.dir == Direction::Horizontal).count();
            assert_eq!(horizontal as u32, m * n);
            let mut key: Vec<_> = matching.iter().map(|x| (x.white, x.black)).collect();
            key.sort();
            assert!(seen.insert(key), "two piles gave the same matching");
        }
    }
}

#[test]
fn partition_examples() {
    let z = kasteleyn_partition(shape(1, 1, 1), 0.5).unwrap();
    assert!((z - 1.5).abs() < 1e-12);
    let z = kasteleyn_partition(shape(1, 1, 2), 0.5).unwrap();
    assert!((z - 1.75).abs() < 1e-12);
    let z = kasteleyn_partition(shape(2, 2, 2), 1.0).unwrap();
    assert!((z - 20.0).abs() < 1e-9);
}

#[test]
fn matches_oracles_on_small_boxes() {
    for m in 1..=3 {
        for n in 1..=3 {
            for k in 1..=3 {
                let s = shape(m, n, k);
                for q in [0.3, 0.5, 0.9] {
                    let z = kasteleyn_partition(s, q).unwrap();
                    let o = oracle_partition(s, q).unwrap();
                    assert!(((z - o) / o).abs() < 1e-9, "{s} q={q}");
                }
                let count = kasteleyn_partition(s, 1.0).unwrap();
                let exact = enumerate_configs(s).unwrap().count() as f64;
                assert!((count - exact).abs() < 1e-6);
                assert!((count - count.round()).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn larger_box_against_product_formula() {
    // Weights span many orders of magnitude at small q; the gauge keeps LU stable.
    let s = shape(8, 7, 9);
    for q in [0.05, 0.1, 0.3, 0.6, 0.95] {
        let k = kasteleyn_log_partition(s, q).unwrap();
        let m = log_z_macmahon(s, q).unwrap();
        assert!(((k - m) / m).abs() < 1e-10, "q={q}: {k} vs {m}");
    }
}

#[test]
fn raw_determinant_includes_reference_weight() {
    let s = shape(2, 3, 2);
    let e = build_embedding(s).unwrap();
    let q: f64 = 0.7;
    let raw = log_abs_det(&e, q).unwrap();
    // Empty pile: top faces at v = y - 1, weight q^-(y-1) per column.
    let reference = -q.ln() * (2.0 * (0.0 + 1.0 + 2.0));
    assert!((raw - reference - kasteleyn_log_partition(s, q).unwrap()).abs() < 1e-12);
    let dense = e.matrix(q);
    assert!((dense.determinant().abs().ln() - raw).abs() < 1e-10);
    assert!(dense.iter().all(|&x| x >= 0.0));
}

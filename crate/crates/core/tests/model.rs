use hexdimer::model::*;
use hexdimer::Error;
use proptest::prelude::*;

fn shape(m: u32, n: u32, k: u32) -> BoxShape {
    BoxShape::new(m, n, k).unwrap()
}

#[test]
fn single_column_configs() {
    let all: Vec<_> = enumerate_configs(shape(1, 1, 1)).unwrap().collect();
    assert_eq!(all.len(), 2);
    assert_eq!(all[0].h, vec![0]);
    assert_eq!(all[1].h, vec![1]);
    assert_eq!(enumerate_configs(shape(1, 1, 2)).unwrap().count(), 3);
}

#[test]
fn two_cube_box_has_twenty_piles() {
    let all: Vec<_> = enumerate_configs(shape(2, 2, 2)).unwrap().collect();
    assert_eq!(all.len(), 20);
    let mut uniq = all.clone();
    uniq.sort_by(|a, b| a.h.cmp(&b.h));
    uniq.dedup();
    assert_eq!(uniq.len(), 20);
    assert!(all.iter().all(|c| c.is_valid(Height::Finite(2))));
}

/// Boxed plane partitions via MacMahon's product at q = 1:
/// prod (i+j+k-1)/(i+j+k-2), evaluated in exact integer arithmetic.
fn macmahon_count(m: u32, n: u32, k: u32) -> u128 {
    let (mut num, mut den) = (1u128, 1u128);
    for i in 1..=m {
        for j in 1..=n {
            for l in 1..=k {
                num *= u128::from(i + j + l - 1);
                den *= u128::from(i + j + l - 2);
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
        }
    }
    assert_eq!(den, 1);
    num
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[test]
fn counts_match_product_formula() {
    for (m, n, k) in [(2, 2, 2), (3, 3, 3), (2, 3, 4), (4, 4, 2), (1, 5, 3)] {
        let count = enumerate_configs(shape(m, n, k)).unwrap().count() as u128;
        assert_eq!(count, macmahon_count(m, n, k), "{m}x{n}x{k}");
    }
}

#[test]
fn energy_examples() {
    assert_eq!(config_energy(&HeightConfig::zeros(3, 2)), 0);
    assert_eq!(config_energy(&HeightConfig::from_rows(&[vec![1]]).unwrap()), 1);
    let c = HeightConfig::from_rows(&[vec![2, 1], vec![1, 0]]).unwrap();
    assert_eq!(config_energy(&c), 4);
    assert!(c.is_valid(Height::Finite(2)));
    assert!(!c.is_valid(Height::Finite(1)));
}

#[test]
fn oracle_examples() {
    assert_eq!(oracle_partition(shape(1, 1, 1), 0.5).unwrap(), 1.5);
    assert_eq!(oracle_partition(shape(1, 1, 2), 0.5).unwrap(), 1.75);
    assert_eq!(oracle_partition(shape(2, 2, 2), 1.0).unwrap(), 20.0);
}

#[test]
fn size_guard() {
    assert!(matches!(enumerate_configs(shape(5, 4, 2)), Err(Error::OracleTooLarge(_))));
    assert!(matches!(enumerate_configs(shape(2, 2, 9)), Err(Error::OracleTooLarge(_))));
    assert!(matches!(
        enumerate_configs(BoxShape::infinite(2, 2).unwrap()),
        Err(Error::InfiniteHeight(_))
    ));
    let wide = OracleLimits { max_cells: 20, max_height: 2 };
    assert!(enumerate_configs_with(shape(5, 4, 1), wide).is_ok());
    assert!(oracle_partition(shape(1, 1, 1), 1.5).is_err());
}

#[test]
fn volume_conventions() {
    assert_eq!(shape(1, 1, 1).volume(), 6.0);
    assert_eq!(shape(2, 1, 1).volume(), 10.0);
    assert_eq!(BoxShape::infinite(3, 4).unwrap().volume(), 12.0);
}

#[test]
fn scaled_shape_round_trip() {
    let s = ScaledShape::finite(3.0, 2.0, 1.0, 1.0 / 50.0).unwrap();
    assert_eq!(s.to_box().unwrap(), shape(150, 100, 50));
    let back = ScaledShape::from_box(shape(150, 100, 50), 0.02).unwrap();
    assert!((back.a - 3.0).abs() < 1e-12);
    assert!(ScaledShape::finite(1.05, 1.0, 1.0, 0.1).unwrap().to_box().is_err());
    assert!(ScaledShape::infinite(1.0, -1.0, 0.1).is_err());
}

#[test]
fn upward_moves_keep_or_break_order_only() {
    for c in enumerate_configs(shape(3, 3, 3)).unwrap() {
        for i in 0..3 {
            for j in 0..3 {
                let mut d = c.clone();
                d.set(i, j, c.get(i, j) + 1);
                let over_k = d.get(i, j) > 3;
                let over_up = i > 0 && d.get(i, j) > d.get(i - 1, j);
                let over_left = j > 0 && d.get(i, j) > d.get(i, j - 1);
                assert_eq!(d.is_valid(Height::Finite(3)), !(over_k || over_up || over_left));
            }
        }
    }
}

#[test]
fn polynomial_matches_direct_sum() {
    let s = shape(3, 3, 3);
    let poly = energy_polynomial(s, OracleLimits::default()).unwrap();
    assert_eq!(poly.len(), 28);
    assert_eq!(poly.iter().sum::<u64>(), 980);
    for q in [0.2, 0.5, 0.9, 1.0] {
        let horner = poly.iter().rev().fold(0.0, |acc, &c| acc * q + c as f64);
        let direct = oracle_partition(s, q).unwrap();
        assert!(((horner - direct) / direct).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn oracle_monotone_in_sides(m in 1u32..3, n in 1u32..3, k in 1u32..3, q in 0.05f64..1.0) {
        let base = oracle_partition(shape(m, n, k), q).unwrap();
        prop_assert!(oracle_partition(shape(m + 1, n, k), q).unwrap() >= base);
        prop_assert!(oracle_partition(shape(m, n + 1, k), q).unwrap() >= base);
        prop_assert!(oracle_partition(shape(m, n, k + 1), q).unwrap() >= base);
    }

    #[test]
    fn enumeration_is_valid_and_sorted(m in 1u32..4, n in 1u32..4, k in 1u32..4) {
        let all: Vec<_> = enumerate_configs(shape(m, n, k)).unwrap().collect();
        prop_assert!(all.iter().all(|c| c.is_valid(Height::Finite(k))));
        prop_assert!(all.windows(2).all(|w| w[0].h < w[1].h));
        prop_assert_eq!(all.len() as u128, macmahon_count(m, n, k));
    }
}

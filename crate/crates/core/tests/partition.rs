use approx::assert_abs_diff_eq;
use hexdimer::model::{oracle_partition, BoxShape, ScaledShape};
use hexdimer::partition::*;
use hexdimer::special::NeumaierSum;
use hexdimer::weight::{Phi, WeightSpec};
use hexdimer::Error;
use proptest::prelude::*;

fn shape(m: u32, n: u32, k: u32) -> BoxShape {
    BoxShape::new(m, n, k).unwrap()
}

#[test]
fn macmahon_examples() {
    assert_abs_diff_eq!(log_z_macmahon(shape(1, 1, 1), 0.5).unwrap(), 1.5f64.ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(log_z_macmahon(shape(1, 1, 2), 0.5).unwrap(), 1.75f64.ln(), epsilon = 1e-15);
    let s = shape(3, 3, 3);
    let oracle = oracle_partition(s, 0.7).unwrap().ln();
    assert_abs_diff_eq!(log_z_macmahon(s, 0.7).unwrap(), oracle, epsilon = 1e-10);
    assert!(log_z_macmahon(s, 1.0).is_err());
    assert!(log_z_macmahon(BoxShape::infinite(2, 2).unwrap(), 0.5).is_err());
}

#[test]
fn naive_triple_product_agrees() {
    let (m, n, k, q) = (4u32, 3u32, 5u32, 0.83f64);
    let mut acc = 0.0;
    for i in 1..=m {
        for j in 1..=n {
            for l in 1..=k {
                let s = f64::from(i + j + l);
                acc += (1.0 - q.powf(s - 1.0)).ln() - (1.0 - q.powf(s - 2.0)).ln();
            }
        }
    }
    assert_abs_diff_eq!(log_z_macmahon(shape(m, n, k), q).unwrap(), acc, epsilon = 1e-12);
}

#[test]
fn infinite_examples() {
    let inf = |m, n| BoxShape::infinite(m, n).unwrap();
    assert_abs_diff_eq!(log_z_infinite(inf(1, 1), 0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
    let expect = -(0.7f64).ln() - (0.91f64).ln();
    assert_abs_diff_eq!(log_z_infinite(inf(1, 2), 0.3).unwrap(), expect, epsilon = 1e-15);
    let limit = log_z_macmahon(shape(2, 2, 200), 0.5).unwrap();
    assert_abs_diff_eq!(log_z_infinite(inf(2, 2), 0.5).unwrap(), limit, epsilon = 1e-12);
    assert!(log_z_infinite(inf(2, 2), 1.0).is_err());
    assert!(log_z_infinite(shape(2, 2, 2), 0.5).is_err());
}

#[test]
fn height_limit_is_monotone_with_geometric_error() {
    let (m, n, q) = (3, 2, 0.6f64);
    let target = log_z_infinite_beta(m, n, -q.ln()).unwrap();
    let mut prev = f64::NEG_INFINITY;
    for k in 1..=40 {
        let v = log_z_macmahon(shape(m, n, k), q).unwrap();
        assert!(v > prev);
        assert!(target - v <= 10.0 * q.powi(k as i32) + 1e-14, "k={k}");
        prev = v;
    }
}

#[test]
fn sliced_examples() {
    let eps = 0.25;
    for (m, n) in [(2, 3), (4, 4)] {
        let s = log_z_sliced(m, n, &Phi::Const { c: 1.0 }, eps).unwrap();
        let u = log_z_infinite_beta(m, n, eps).unwrap();
        assert!(((s - u) / u).abs() < 1e-12);
    }
    let single = log_z_sliced(1, 1, &Phi::Cosine, 0.1).unwrap();
    let p = Phi::Cosine.value(0.0);
    assert_abs_diff_eq!(single, -(1.0 - (-0.1 * p).exp()).ln(), epsilon = 1e-15);
    let bad = Phi::Linear { alpha: -1.0, beta: 0.0 };
    assert!(matches!(log_z_sliced(2, 2, &bad, 0.1), Err(Error::NonPositiveLogArgument { .. })));
}

/// Re-evaluates every factor from scratch with no caching.
fn naive_sliced(m: u32, n: u32, phi: &Phi, eps: f64) -> f64 {
    let t0 = (f64::from(n) - f64::from(m)) * eps;
    let mut acc = NeumaierSum::new();
    for i in 0..n {
        for j in 0..m {
            let mut down = 0.0;
            for k in 0..=i {
                down += eps * phi.value(t0 + -1.0 * f64::from(k) * eps);
            }
            let mut up = 0.0;
            for l in 0..=j {
                up += eps * phi.value(t0 + 1.0 * f64::from(l) * eps);
            }
            let x = down + up - eps * phi.value(t0);
            acc += if x < std::f64::consts::LN_2 { -(-(-x).exp_m1()).ln() } else { -(-(-x).exp()).ln_1p() };
        }
    }
    acc.value()
}

#[test]
fn sliced_matches_naive_loop_bitwise() {
    let eps = 1.0 / 20.0;
    let (m, n) = (20, 60);
    let fast = log_z_sliced(m, n, &Phi::Cosine, eps).unwrap();
    let slow = naive_sliced(m, n, &Phi::Cosine, eps);
    assert_eq!(fast.to_bits(), slow.to_bits());
    assert!(fast.is_finite() && fast > 0.0);
}

#[test]
fn free_energy_examples() {
    let s = ScaledShape::finite(1.0, 1.0, 1.0, 1.0).unwrap();
    let q = (-1.0f64).exp();
    let f = free_energy(&s, &WeightSpec::uniform(q).unwrap()).unwrap();
    assert_abs_diff_eq!(f.f, -(1.0 + q).ln() / 6.0, epsilon = 1e-15);
    assert_eq!(f.inv_eps, 1);

    let settings = SeriesSettings::default();
    let s = ScaledShape::finite(1.0, 1.0, 1.0, 0.1).unwrap();
    assert_abs_diff_eq!(scaling_free_energy(&s).unwrap(), series_free_energy(&s, &settings).unwrap(), epsilon = 1e-12);
    let s = ScaledShape::infinite(1.0, 1.0, 0.1).unwrap();
    assert_abs_diff_eq!(scaling_free_energy(&s).unwrap(), series_free_energy(&s, &settings).unwrap(), epsilon = 1e-12);
    let via_q = free_energy(&s, &WeightSpec::uniform((-0.1f64).exp()).unwrap()).unwrap();
    assert_abs_diff_eq!(via_q.f, scaling_free_energy(&s).unwrap(), epsilon = 1e-14);

    let sliced = free_energy(&s, &WeightSpec::Sliced(Phi::Const { c: 1.0 })).unwrap();
    assert_abs_diff_eq!(sliced.f, via_q.f, epsilon = 1e-14);
    let finite = ScaledShape::finite(1.0, 1.0, 1.0, 0.1).unwrap();
    assert!(free_energy(&finite, &WeightSpec::Sliced(Phi::Cosine)).is_err());
}

#[test]
fn dual_evaluators_agree() {
    let settings = SeriesSettings::default();
    for inv in [10u32, 50, 100] {
        let eps = 1.0 / f64::from(inv);
        for (a, b, c) in [(1.0, 1.0, 1.0), (3.0, 2.0, 1.0)] {
            let s = ScaledShape::finite(a, b, c, eps).unwrap();
            let d = (series_free_energy(&s, &settings).unwrap() - scaling_free_energy(&s).unwrap()).abs();
            assert!(d < 1e-11, "{a},{b},{c} 1/eps={inv}: {d}");
        }
    }
}

#[test]
fn series_cap_is_reported() {
    let s = ScaledShape::finite(1.0, 1.0, 1.0, 0.001).unwrap();
    let tight = SeriesSettings { term_tol: 1e-16, n_max_cap: 10 };
    assert!(matches!(series_free_energy(&s, &tight), Err(Error::SeriesNotConverged { terms: 10, .. })));
}

proptest! {
    #[test]
    fn macmahon_symmetric(m in 1u32..6, n in 1u32..6, k in 1u32..6, q in 0.05f64..0.99) {
        let base = log_z_macmahon(shape(m, n, k), q).unwrap();
        for (x, y, z) in [(m, k, n), (n, m, k), (n, k, m), (k, m, n), (k, n, m)] {
            let v = log_z_macmahon(shape(x, y, z), q).unwrap();
            prop_assert!((v - base).abs() <= 1e-12 * base.abs().max(1.0));
        }
    }

    #[test]
    fn constant_phi_reduces_to_uniform(m in 1u32..12, n in 1u32..12, c in 0.2f64..3.0, inv in 2u32..20) {
        let eps = 1.0 / f64::from(inv);
        let s = log_z_sliced(m, n, &Phi::Const { c }, eps).unwrap();
        let u = log_z_infinite_beta(m, n, eps * c).unwrap();
        prop_assert!(((s - u) / u).abs() < 1e-12);
    }
}

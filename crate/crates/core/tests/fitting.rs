use approx::assert_abs_diff_eq;
use hexdimer::asymptotics::{coeffs_infinite, ExpansionCoefficients, Provenance, Scenario};
use hexdimer::fitting::{fit, residual_slope, sample_grid, BasisTerm, FitBasis};
use hexdimer::partition::FreeEnergySample;
use hexdimer::Error;
use proptest::prelude::*;

fn synthetic(grid: &[u32], f: impl Fn(f64) -> f64) -> Vec<FreeEnergySample> {
    grid.iter()
        .map(|&i| {
            let eps = 1.0 / f64::from(i);
            FreeEnergySample { inv_eps: i, eps, f: f(eps) }
        })
        .collect()
}

const TRUE: [f64; 6] = [0.3, 0.0, 0.05, -0.2, 0.7, -0.1];

fn truth(e: f64) -> f64 {
    let basis = FitBasis::default();
    basis.terms.iter().zip(TRUE).map(|(t, c)| c * t.eval(e)).sum()
}

#[test]
fn grid_examples() {
    assert_eq!(sample_grid(2, 5).unwrap(), vec![2, 3, 4, 5]);
    assert_eq!(sample_grid(2, 200).unwrap().len(), 199);
    assert!(matches!(sample_grid(10, 10), Err(Error::InvalidArgument(_))));
    assert!(sample_grid(1, 10).is_err());
}

#[test]
fn recovers_synthetic_coefficients() {
    let samples = synthetic(&sample_grid(2, 200).unwrap(), truth);
    let r = fit(&samples, &FitBasis::default()).unwrap();
    for (got, want) in r.coefficients.iter().zip(TRUE) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
    }
    assert!(r.residual_rms < 1e-14);
    assert!(r.condition_estimate > 1.0 && r.condition_estimate < 1e12);
    let e = r.expansion(Scenario::Finite);
    assert_eq!(e.provenance, Provenance::Fitted);
    assert_abs_diff_eq!(e.f2, 0.05, epsilon = 1e-10);
    assert_eq!(r.coefficient(BasisTerm::Eps4).map(|c| (c + 0.1).abs() < 1e-9), Some(true));
}

#[test]
fn eps3_residual_has_slope_three() {
    let known = ExpansionCoefficients {
        f0: 0.3,
        f1: 0.0,
        f2: 0.05,
        f3: -0.2,
        scenario: Scenario::Finite,
        provenance: Provenance::Analytic,
    };
    let samples = synthetic(&sample_grid(2, 200).unwrap(), |e| {
        0.3 + 0.05 * e * e * e.ln() - 0.2 * e * e + 0.5 * e.powi(3)
    });
    let slope = residual_slope(&samples, &known).unwrap();
    assert!((slope - 3.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn too_few_points() {
    let samples = synthetic(&[2, 3, 4, 5, 6, 7, 8, 9], truth);
    assert!(matches!(fit(&samples, &FitBasis::default()), Err(Error::TooFewPoints { got: 8, need: 10 })));
}

#[test]
fn duplicate_eps_rejected() {
    let mut samples = synthetic(&sample_grid(2, 40).unwrap(), truth);
    samples.push(samples[3]);
    assert!(fit(&samples, &FitBasis::default()).is_err());
}

#[test]
fn degenerate_basis_is_ill_conditioned() {
    let basis = FitBasis { terms: vec![BasisTerm::One, BasisTerm::Eps, BasisTerm::Eps] };
    let samples = synthetic(&sample_grid(2, 50).unwrap(), truth);
    assert!(matches!(fit(&samples, &basis), Err(Error::IllConditioned(_))));
}

#[test]
fn infinite_box_fit_matches_analytic() {
    use hexdimer::experiments::{run_fit, Problem};
    let p = Problem::Infinite { a: 2.0, b: 1.0 };
    let run = run_fit(&p, 2, 200, &FitBasis::default(), &Default::default()).unwrap();
    let fitted = run.fit.expansion(Scenario::Infinite).negated();
    let analytic = coeffs_infinite(2.0, 1.0).unwrap().negated();
    assert!(fitted.f1.abs() < 1e-5);
    assert_abs_diff_eq!(12.0 * 2.0 * fitted.f2, 1.0, epsilon = 2e-3);
    assert_abs_diff_eq!(fitted.f0, analytic.f0, epsilon = 1e-7);
    assert_abs_diff_eq!(fitted.f3, analytic.f3, epsilon = 2e-4);
    let slope = run.analytic_slope.unwrap();
    assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn order_of_samples_is_irrelevant(seed in any::<u64>()) {
        let mut samples = synthetic(&sample_grid(2, 80).unwrap(), truth);
        let base = fit(&samples, &FitBasis::default()).unwrap();
        // Deterministic shuffle from the seed.
        let mut state = seed | 1;
        for i in (1..samples.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            samples.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let shuffled = fit(&samples, &FitBasis::default()).unwrap();
        prop_assert_eq!(base.coefficients, shuffled.coefficients);
    }
}

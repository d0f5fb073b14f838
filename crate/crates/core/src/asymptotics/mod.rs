//! Coefficients of f = f0 + f1 eps + f2 eps^2 ln eps + f3 eps^2 + o(eps^2).
//!
//! All coefficients refer to f = -ln Z / V. Tables of fitted parameters are
//! customarily quoted for +ln Z / V; [`ExpansionCoefficients::negated`] converts.

mod sliced;

pub use sliced::{coeffs_sliced, sliced_f0, sliced_f3, SlicedDerivativeSettings, SlicedF3};

use crate::error::Result;
use crate::special::{li, universal_constant, zeta, NeumaierSum, QuadratureSettings};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Finite,
    Infinite,
    Sliced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Fitted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionCoefficients {
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub scenario: Scenario,
    pub provenance: Provenance,
}

impl ExpansionCoefficients {
    /// Coefficients of the expansion of -f.
    pub fn negated(&self) -> Self {
        Self {
            f0: -self.f0,
            f1: -self.f1,
            f2: -self.f2,
            f3: -self.f3,
            ..*self
        }
    }
}

pub fn predict_free_energy(c: &ExpansionCoefficients, eps: f64) -> f64 {
    let log_term = if eps > 0.0 { eps * eps * eps.ln() } else { 0.0 };
    c.f0 + c.f1 * eps + c.f2 * log_term + c.f3 * eps * eps
}

/// Cached value of the universal constant at default settings.
pub fn constant() -> Result<f64> {
    use std::sync::OnceLock;
    static C: OnceLock<std::result::Result<f64, crate::Error>> = OnceLock::new();
    C.get_or_init(|| universal_constant(&QuadratureSettings::default()).map(|e| e.value))
        .clone()
}

fn ln_one_minus_exp(x: f64) -> f64 {
    (-(-x).exp_m1()).ln()
}

/// Closed form of sum_n (H_n - 1)/n with H_n = prod_i (1 - e^{-n x_i}):
/// the inclusion-exclusion sum of ln(1 - e^{-(sum of subset)}).
pub fn log_combination(sides: &[f64]) -> f64 {
    let k = sides.len();
    let mut acc = NeumaierSum::new();
    for mask in 1u32..(1 << k) {
        let s: f64 = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| sides[i]).sum();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * ln_one_minus_exp(s);
    }
    acc.value()
}

/// The same quantity summed term by term.
pub fn log_series(sides: &[f64], terms: u64) -> f64 {
    let mut acc = NeumaierSum::new();
    for n in 1..=terms {
        let nf = n as f64;
        let h: f64 = sides.iter().map(|&x| -(-nf * x).exp_m1()).product();
        acc += (h - 1.0) / nf;
    }
    acc.value()
}

/// Signed inclusion-exclusion sum of Li3(e^{-subset sum}) minus zeta(3).
fn li3_combination(sides: &[f64]) -> Result<f64> {
    let k = sides.len();
    let mut acc = NeumaierSum::new();
    for mask in 1u32..(1 << k) {
        let s: f64 = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| sides[i]).sum();
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        acc += sign * li(3, (-s).exp())?;
    }
    acc += -zeta(3)?;
    Ok(acc.value())
}

/// Box of finite height with scaled sides a, b, c.
pub fn coeffs_finite(a: f64, b: f64, c: f64) -> Result<ExpansionCoefficients> {
    let sides = [a, b, c];
    let s = a * b + b * c + c * a;
    let big_c = constant()?;
    Ok(ExpansionCoefficients {
        f0: li3_combination(&sides)? / (2.0 * s),
        f1: 0.0,
        f2: -1.0 / (24.0 * s),
        f3: -(big_c / 2.0 - log_combination(&sides) / 12.0 - 0.125) / (2.0 * s),
        scenario: Scenario::Finite,
        provenance: Provenance::Analytic,
    })
}

/// Unbounded height over an a x b base.
pub fn coeffs_infinite(a: f64, b: f64) -> Result<ExpansionCoefficients> {
    let sides = [a, b];
    let ab = a * b;
    let big_c = constant()?;
    Ok(ExpansionCoefficients {
        f0: li3_combination(&sides)? / ab,
        f1: 0.0,
        f2: -1.0 / (12.0 * ab),
        f3: -(big_c / 2.0 - log_combination(&sides) / 12.0 - 0.125) / ab,
        scenario: Scenario::Infinite,
        provenance: Provenance::Analytic,
    })
}

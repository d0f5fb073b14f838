//! Least-squares extraction of expansion coefficients from exact samples.

use crate::asymptotics::{predict_free_energy, ExpansionCoefficients, Provenance, Scenario};
use crate::error::{Error, Result};
use crate::partition::FreeEnergySample;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;

const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisTerm {
    One,
    Eps,
    Eps2Log,
    Eps2,
    Eps3,
    Eps4,
}

impl BasisTerm {
    pub fn eval(self, e: f64) -> f64 {
        match self {
            BasisTerm::One => 1.0,
            BasisTerm::Eps => e,
            BasisTerm::Eps2Log => e * e * e.ln(),
            BasisTerm::Eps2 => e * e,
            BasisTerm::Eps3 => e * e * e,
            BasisTerm::Eps4 => e * e * e * e,
        }
    }
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisTerm::One => "1",
            BasisTerm::Eps => "eps",
            BasisTerm::Eps2Log => "eps^2*ln(eps)",
            BasisTerm::Eps2 => "eps^2",
            BasisTerm::Eps3 => "eps^3",
            BasisTerm::Eps4 => "eps^4",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitBasis {
    pub terms: Vec<BasisTerm>,
}

impl Default for FitBasis {
    fn default() -> Self {
        use BasisTerm::*;
        Self { terms: vec![One, Eps, Eps2Log, Eps2, Eps3, Eps4] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub basis: FitBasis,
    pub coefficients: Vec<f64>,
    pub residual_rms: f64,
    pub condition_estimate: f64,
    /// Log-log slope of the residual of the four-term prediction, when enough
    /// small-eps samples are available.
    pub residual_slope: Option<f64>,
}

impl FitResult {
    pub fn coefficient(&self, term: BasisTerm) -> Option<f64> {
        self.basis.terms.iter().position(|&t| t == term).map(|i| self.coefficients[i])
    }

    /// The f0..f3 part of the fit; terms absent from the basis read as 0.
    pub fn expansion(&self, scenario: Scenario) -> ExpansionCoefficients {
        let get = |t| self.coefficient(t).unwrap_or(0.0);
        ExpansionCoefficients {
            f0: get(BasisTerm::One),
            f1: get(BasisTerm::Eps),
            f2: get(BasisTerm::Eps2Log),
            f3: get(BasisTerm::Eps2),
            scenario,
            provenance: Provenance::Fitted,
        }
    }
}

/// 1/eps values min..=max.
pub fn sample_grid(inv_eps_min: u32, inv_eps_max: u32) -> Result<Vec<u32>> {
    if inv_eps_min < 2 || inv_eps_min >= inv_eps_max {
        return Err(Error::InvalidArgument(format!(
            "need 2 <= inv_eps_min < inv_eps_max, got {inv_eps_min}..{inv_eps_max}"
        )));
    }
    Ok((inv_eps_min..=inv_eps_max).collect())
}

fn canonical(samples: &[FreeEnergySample]) -> Result<Vec<FreeEnergySample>> {
    let mut s = samples.to_vec();
    s.sort_by(|x, y| x.eps.total_cmp(&y.eps));
    if s.windows(2).any(|w| w[0].eps == w[1].eps) {
        return Err(Error::InvalidArgument("duplicate eps in samples".into()));
    }
    if s.iter().any(|x| !(x.eps > 0.0) || !x.f.is_finite()) {
        return Err(Error::InvalidArgument("samples need eps > 0 and finite f".into()));
    }
    Ok(s)
}

/// Linear least squares by SVD on unit-norm columns.
pub fn fit(samples: &[FreeEnergySample], basis: &FitBasis) -> Result<FitResult> {
    let k = basis.terms.len();
    let s = canonical(samples)?;
    if k == 0 || s.len() < k + 4 {
        return Err(Error::TooFewPoints { got: s.len(), need: k + 4 });
    }
    let rows = s.len();
    let mut a = DMatrix::from_fn(rows, k, |r, c| basis.terms[c].eval(s[r].eps));
    let y = DVector::from_iterator(rows, s.iter().map(|x| x.f));
    let norms: Vec<f64> = (0..k).map(|c| a.column(c).norm()).collect();
    for (c, &nrm) in norms.iter().enumerate() {
        if nrm == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        a.column_mut(c).scale_mut(1.0 / nrm);
    }
    let svd = a.clone().svd(true, true);
    let (smax, smin) = svd
        .singular_values
        .iter()
        .fold((0.0f64, f64::INFINITY), |(hi, lo), &v| (hi.max(v), lo.min(v)));
    let condition = smax / smin;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition));
    }
    let scaled = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::InvalidArgument(format!("SVD solve failed: {e}")))?;
    let resid = &y - &a * &scaled;
    let coefficients: Vec<f64> = scaled.iter().zip(&norms).map(|(c, n)| c / n).collect();
    let mut out = FitResult {
        basis: basis.clone(),
        coefficients,
        residual_rms: (resid.norm_squared() / rows as f64).sqrt(),
        condition_estimate: condition,
        residual_slope: None,
    };
    out.residual_slope = residual_slope(&s, &out.expansion(Scenario::Finite)).ok();
    Ok(out)
}

/// Residual slope over samples with 1/eps >= 20.
pub fn residual_slope(samples: &[FreeEnergySample], coeffs: &ExpansionCoefficients) -> Result<f64> {
    let usable = samples.iter().filter(|s| s.inv_eps >= 20).count();
    if usable < 10 {
        return Err(Error::TooFewPoints { got: usable, need: 10 });
    }
    residual_slope_in(samples, coeffs, 20, u32::MAX)
}

/// Least-squares slope of ln |f - prediction| against ln eps over
/// inv_eps in [lo, hi]; exact zeros are skipped.
pub fn residual_slope_in(
    samples: &[FreeEnergySample],
    coeffs: &ExpansionCoefficients,
    lo: u32,
    hi: u32,
) -> Result<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| (lo..=hi).contains(&s.inv_eps))
        .filter_map(|s| {
            let r = (s.f - predict_free_energy(coeffs, s.eps)).abs();
            (r > 0.0).then(|| (s.eps.ln(), r.ln()))
        })
        .collect();
    if pts.len() < 5 {
        return Err(Error::TooFewPoints { got: pts.len(), need: 5 });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

//! Exact log-partition functions, free energies and the resummed series.
//!
//! Free energies follow f = -ln Z / V throughout.

use crate::error::{Error, Result};
use crate::model::{BoxShape, Height, ScaledShape};
use crate::special::{chi, NeumaierSum};
use crate::weight::{Phi, WeightSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEnergySample {
    pub inv_eps: u32,
    pub eps: f64,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSettings {
    pub term_tol: f64,
    pub n_max_cap: u64,
}

impl Default for SeriesSettings {
    fn default() -> Self {
        Self { term_tol: 1e-16, n_max_cap: 10_000_000 }
    }
}

/// beta = -ln q for q in (0, 1).
fn beta_of(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "q = {q} outside (0, 1); use the enumeration oracle at q = 1"
        )));
    }
    Ok(-q.ln())
}

/// ln(1 - e^-x) for x > 0, accurate at both ends.
fn ln_one_minus_exp(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

/// Number of triples (i, j, k) in [1,m]x[1,n]x[1,k] with each value of i+j+k,
/// indexed by i+j+k-3.
fn sum_multiplicities(sides: &[u32]) -> Vec<u64> {
    let mut counts = vec![1u64];
    for &len in sides {
        let mut next = vec![0u64; counts.len() + len as usize - 1];
        // Sliding-window convolution with a block of `len` ones.
        let mut window = 0u64;
        for (s, slot) in next.iter_mut().enumerate() {
            if s < counts.len() {
                window += counts[s];
            }
            if s >= len as usize {
                window -= counts[s - len as usize];
            }
            *slot = window;
        }
        counts = next;
    }
    counts
}

/// ln Z of the boxed plane-partition generating function, q = e^-beta.
pub fn log_z_macmahon_beta(shape: BoxShape, beta: f64) -> Result<f64> {
    let k = shape.finite_k().ok_or(Error::InfiniteHeight("the MacMahon product"))?;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
    }
    let mult = sum_multiplicities(&[shape.m, shape.n, k]);
    let one_minus_q = -(-beta).exp_m1();
    let mut acc = NeumaierSum::new();
    // Each factor is (1 - q^(s-1)) / (1 - q^(s-2)) = 1 + q^(s-2)(1-q)/(1-q^(s-2)).
    for (idx, &c) in mult.iter().enumerate().rev() {
        let s2 = (idx + 1) as f64;
        let x = (-beta * s2).exp() * one_minus_q / -(-beta * s2).exp_m1();
        acc += c as f64 * x.ln_1p();
    }
    Ok(acc.value())
}

pub fn log_z_macmahon(shape: BoxShape, q: f64) -> Result<f64> {
    log_z_macmahon_beta(shape, beta_of(q)?)
}

/// ln Z for unbounded height, q = e^-beta.
pub fn log_z_infinite_beta(m: u32, n: u32, beta: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("box sides must be positive".into()));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta = {beta} must be positive (the product diverges at q >= 1)"
        )));
    }
    let mult = sum_multiplicities(&[m, n]);
    let mut acc = NeumaierSum::new();
    for (idx, &c) in mult.iter().enumerate().rev() {
        acc += -(c as f64) * ln_one_minus_exp(beta * (idx + 1) as f64);
    }
    Ok(acc.value())
}

pub fn log_z_infinite(shape: BoxShape, q: f64) -> Result<f64> {
    if shape.k != Height::Infinite {
        return Err(Error::InvalidArgument(format!("{shape} has finite height")));
    }
    log_z_infinite_beta(shape.m, shape.n, beta_of(q)?)
}

/// ln Z with slice weights q_t = exp(-eps phi(t eps)) on an m x n base.
///
/// Slice t runs from -m (bottom-left) to n (bottom-right) relative to t0 = (n - m) eps
/// at the corner. Row and column factors are prefix sums of eps * phi.
pub fn log_z_sliced(m: u32, n: u32, phi: &Phi, eps: f64) -> Result<f64> {
    if m == 0 || n == 0 || !(eps > 0.0) {
        return Err(Error::InvalidArgument("need m, n >= 1 and eps > 0".into()));
    }
    let t0 = (f64::from(n) - f64::from(m)) * eps;
    let p0 = phi.value(t0);
    let prefix = |len: u32, dir: f64| -> Vec<f64> {
        let mut acc = 0.0;
        (0..len)
            .map(|k| {
                acc += eps * phi.value(t0 + dir * f64::from(k) * eps);
                acc
            })
            .collect()
    };
    let down = prefix(n, -1.0);
    let up = prefix(m, 1.0);
    let shift = eps * p0;
    let mut acc = NeumaierSum::new();
    for (i, &ri) in down.iter().enumerate() {
        for (j, &rj) in up.iter().enumerate() {
            let x = ri + rj - shift;
            if !(x > 0.0) {
                return Err(Error::NonPositiveLogArgument {
                    i,
                    j,
                    value: -(-x).exp_m1(),
                });
            }
            acc += -ln_one_minus_exp(x);
        }
    }
    Ok(acc.value())
}

/// Free energy -ln Z / V of a scaled shape.
///
/// Uniform weights use the given q; sliced weights require unbounded height.
pub fn free_energy(shape: &ScaledShape, weights: &WeightSpec) -> Result<FreeEnergySample> {
    let lattice = shape.to_box()?;
    let log_z = match (weights, lattice.k) {
        (WeightSpec::Uniform { q }, Height::Finite(_)) => log_z_macmahon(lattice, *q)?,
        (WeightSpec::Uniform { q }, Height::Infinite) => log_z_infinite(lattice, *q)?,
        (WeightSpec::Sliced(phi), Height::Infinite) => {
            phi.check_positive(-shape.a, shape.b)?;
            log_z_sliced(lattice.m, lattice.n, phi, shape.eps)?
        }
        (WeightSpec::Sliced(_), Height::Finite(_)) => {
            return Err(Error::InvalidArgument(
                "slice weights are defined for unbounded height only".into(),
            ))
        }
    };
    Ok(FreeEnergySample {
        inv_eps: (1.0 / shape.eps).round() as u32,
        eps: shape.eps,
        f: -log_z / lattice.volume(),
    })
}

/// Free energy at the scaling weight q = e^-eps (with beta = eps exactly).
pub fn scaling_free_energy(shape: &ScaledShape) -> Result<f64> {
    let lattice = shape.to_box()?;
    let log_z = match lattice.k {
        Height::Finite(_) => log_z_macmahon_beta(lattice, shape.eps)?,
        Height::Infinite => log_z_infinite_beta(lattice.m, lattice.n, shape.eps)?,
    };
    Ok(-log_z / lattice.volume())
}

/// Same free energy from the resummed series in chi(n eps) H_n / n^3.
pub fn series_free_energy(shape: &ScaledShape, s: &SeriesSettings) -> Result<f64> {
    let (a, b, eps) = (shape.a, shape.b, shape.eps);
    let (norm, sides): (f64, Vec<f64>) = match shape.c {
        Some(c) => (2.0 * (a * b + b * c + c * a), vec![a, b, c]),
        None => (a * b, vec![a, b]),
    };
    let mut acc = NeumaierSum::new();
    for n in 1..=s.n_max_cap {
        let nf = n as f64;
        let h: f64 = sides.iter().map(|&x| -(-nf * x).exp_m1()).product();
        let ch = chi(nf * eps);
        acc += ch * h / (nf * nf * nf);
        // chi decreases on (0, inf) and H_n <= 1.
        let tail = ch / (2.0 * nf * nf);
        if tail < s.term_tol {
            return Ok(-acc.value() / norm);
        }
    }
    Err(Error::SeriesNotConverged {
        terms: s.n_max_cap,
        partial_sum: -acc.value() / norm,
    })
}

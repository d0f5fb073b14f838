//! Numerical integration: adaptive Gauss-Kronrod for the universal constant
//! and fixed Gauss-Legendre rules for smooth integrands.

use super::{q_func, NeumaierSum};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 15-point Kronrod panel; returns (K15 estimate, |K15 - G7|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive bisection driven by the largest panel error.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Integral> {
    let (v, e) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total: NeumaierSum = panels.iter().map(|p| p.2).collect();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        let value = total.value();
        if err <= rel_tol * value.abs() || err < 1e-300 {
            return Ok(Integral { value, error: err });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNotConverged {
                achieved: err / value.abs(),
                requested: rel_tol,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
        // Keep summation order independent of refinement history.
        panels.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub z_cut: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            z_cut: 60.0,
            max_panels: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub quadrature_error: f64,
    pub tail_bound: f64,
}

/// The integral of e^-z Q(z) over [0, inf).
///
/// Q(z) grows linearly, so the neglected tail is bounded by
/// the integral of z e^-z beyond z_cut, i.e. (z_cut + 1) e^-z_cut.
pub fn universal_constant(s: &QuadratureSettings) -> Result<ConstantEstimate> {
    if !(s.rel_tol > 0.0) || !(s.z_cut > 0.0) {
        return Err(Error::InvalidArgument("rel_tol and z_cut must be positive".into()));
    }
    let tail_bound = (s.z_cut + 1.0) * (-s.z_cut).exp();
    if tail_bound >= s.rel_tol * 0.08 {
        return Err(Error::InvalidArgument(format!(
            "z_cut = {} leaves a tail bound {tail_bound:e} above the requested tolerance",
            s.z_cut
        )));
    }
    let r = integrate_adaptive(
        |z| (-z).exp() * q_func(z),
        0.0,
        s.z_cut,
        s.rel_tol,
        s.max_panels,
    )?;
    Ok(ConstantEstimate {
        value: r.value,
        quadrature_error: r.error,
        tail_bound,
    })
}

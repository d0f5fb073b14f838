//! Slice-weighted box: f0 from a double integral, f3 from second
//! eps-derivatives of the four constituent series.
//!
//! Notation (t0 = b - a, p = phi(t0), sigma = -1 towards t0 - b, +1 towards t0 + a):
//!
//! * rho(eps)    = p + sigma eps/2 phi'(t0) + eps^2/12 phi''(t0)
//! * r(x; eps)   = sigma (Phi(t0 + sigma x) - Phi(t0)) + eps/2 (phi - p)
//!   + sigma eps^2/12 (phi' - phi'(t0)), with phi at t0 + sigma x
//! * psi_n(x)    = exp(-n r) - exp(-n x rho)
//! * P_n(eps)    = Euler-Maclaurin sum of psi_n over the side
//! * G_n(eps)    = the same sum of exp(-n x rho), done in closed form
//!
//! The per-n series term is then split into a corner part plus
//! G- P+, P- G+ and P- P+ cross parts, each differentiated twice at eps = 0.

use super::{constant, ExpansionCoefficients, Provenance, Scenario};
use crate::error::{Error, Result};
use crate::special::quadrature::gauss_legendre;
use crate::special::NeumaierSum;
use crate::weight::Phi;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicedDerivativeSettings {
    /// Finite-difference steps; the step used for term n is fd_steps[i] / n.
    pub fd_steps: Vec<f64>,
    /// Leading power of the step in the finite-difference error.
    pub richardson_order: u32,
    /// Number of series terms summed explicitly before the tail fit.
    pub n_terms: usize,
    /// Gauss-Legendre points per panel and panels per half-interval.
    pub gl_points: usize,
    pub panels: usize,
}

impl Default for SlicedDerivativeSettings {
    fn default() -> Self {
        Self {
            fd_steps: vec![1.0 / 64.0, 1.0 / 96.0, 1.0 / 128.0, 1.0 / 192.0],
            richardson_order: 2,
            n_terms: 512,
            gl_points: 20,
            panels: 40,
        }
    }
}

impl SlicedDerivativeSettings {
    fn validate(&self) -> Result<()> {
        if self.fd_steps.len() < 3 {
            return Err(Error::InvalidArgument("need at least 3 finite-difference steps".into()));
        }
        if self.fd_steps.windows(2).any(|w| !(w[1] < w[0])) || !(self.fd_steps[0] > 0.0) {
            return Err(Error::InvalidArgument("fd_steps must be positive and strictly decreasing".into()));
        }
        if self.richardson_order == 0 || self.n_terms < 32 || self.gl_points == 0 || self.panels == 0 {
            return Err(Error::InvalidArgument("invalid sliced derivative settings".into()));
        }
        Ok(())
    }
}

/// Breakdown of f3 (in the -ln Z / V convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlicedF3 {
    pub value: f64,
    /// Constant, logarithm and universal-constant part.
    pub base: f64,
    /// Corner, G-P+, P-G+ and P-P+ series, summed to n_terms.
    pub series: [f64; 4],
    /// Fitted remainder of the series beyond n_terms.
    pub tail: f64,
    /// Accumulated finite-difference noise estimate.
    pub noise: f64,
}

/// s / (1 - e^-s), finite through s = 0.
fn u(w: f64) -> f64 {
    if w.abs() < 1e-4 {
        1.0 + w / 2.0 + w * w / 12.0
    } else {
        w / -(-w).exp_m1()
    }
}

fn ln_one_minus_exp(x: f64) -> f64 {
    (-(-x).exp_m1()).ln()
}

#[derive(Debug, Clone, Copy)]
struct Anchor {
    t0: f64,
    p: f64,
    p1: f64,
    p2: f64,
    big_p: f64,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    w: f64,
    /// sigma (Phi(t0 + sigma x) - Phi(t0))
    integral: f64,
    phi: f64,
    d1: f64,
    d2: f64,
}

struct Side {
    sigma: f64,
    len: f64,
    nodes: Vec<Node>,
    end: Node,
}

impl Side {
    fn node(phi: &Phi, at: &Anchor, sigma: f64, x: f64, w: f64) -> Node {
        let t = at.t0 + sigma * x;
        Node {
            x,
            w,
            integral: sigma * (phi.primitive(t) - at.big_p),
            phi: phi.value(t),
            d1: phi.d1(t),
            d2: phi.d2(t),
        }
    }

    /// Composite rule with a dense block near x = 0, where exp(-n r) decays.
    fn new(phi: &Phi, at: &Anchor, sigma: f64, len: f64, n: usize, decay: f64, gl: &(Vec<f64>, Vec<f64>), panels: usize) -> Self {
        let knee = len.min(20.0 * len.min(1.0 / (n as f64 * decay)));
        let mut edges: Vec<f64> = (0..=panels).map(|i| knee * i as f64 / panels as f64).collect();
        if knee < len {
            edges.extend((1..=panels).map(|i| knee + (len - knee) * i as f64 / panels as f64));
        }
        let mut nodes = Vec::with_capacity((edges.len() - 1) * gl.0.len());
        for w in edges.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (xi, wi) in gl.0.iter().zip(&gl.1) {
                nodes.push(Self::node(phi, at, sigma, c + h * xi, h * wi));
            }
        }
        let end = Self::node(phi, at, sigma, len, 0.0);
        Self { sigma, len, nodes, end }
    }

    fn rho(&self, at: &Anchor, e: f64) -> f64 {
        at.p + self.sigma * e / 2.0 * at.p1 + e * e / 12.0 * at.p2
    }

    fn r(&self, at: &Anchor, nd: &Node, e: f64) -> f64 {
        nd.integral + e / 2.0 * (nd.phi - at.p) + self.sigma * e * e / 12.0 * (nd.d1 - at.p1)
    }

    /// (P, G) for term n at mesh e.
    fn pg(&self, at: &Anchor, n: f64, e: f64) -> (f64, f64) {
        let rho = self.rho(at, e);
        let psi = |nd: &Node| (-n * self.r(at, nd, e)).exp() - (-n * nd.x * rho).exp();
        let mut acc = NeumaierSum::new();
        for nd in &self.nodes {
            acc += nd.w * psi(nd);
        }
        let end = &self.end;
        let dr = end.phi + self.sigma * e / 2.0 * end.d1 + e * e / 12.0 * end.d2;
        let dpsi = -n * dr * (-n * self.r(at, end, e)).exp() + n * rho * (-n * self.len * rho).exp();
        let p = acc.value() - e / 2.0 * psi(end) + e * e / 12.0 * dpsi;
        let g = -(-n * self.len * rho).exp_m1() * u(n * e * rho) / (n * rho);
        (p, g)
    }
}

/// The four per-term pieces at mesh e.
fn pieces(at: &Anchor, minus: &Side, plus: &Side, a: f64, b: f64, n: f64, e: f64) -> [f64; 4] {
    let (pm, gm) = minus.pg(at, n, e);
    let (pp, gp) = plus.pg(at, n, e);
    let (rm, rp) = (minus.rho(at, e), plus.rho(at, e));
    let h = (-n * b * rm).exp_m1() * (-n * a * rp).exp_m1();
    let pref = (-n * e * at.p).exp();
    [at.p * at.p * h / (rm * rp), pref * gm * pp, pref * pm * gp, pref * pm * pp]
}

/// Neville extrapolation to zero step of values d at step powers hk.
fn neville(d: &[f64], hk: &[f64]) -> f64 {
    let mut tab = d.to_vec();
    let k = tab.len();
    for lvl in 1..k {
        for i in 0..k - lvl {
            tab[i] = (hk[i + lvl] * tab[i] - hk[i] * tab[i + 1]) / (hk[i + lvl] - hk[i]);
        }
    }
    tab[0]
}

/// Second derivatives at eps = 0 with a noise estimate per piece.
fn second_derivatives(f: impl Fn(f64) -> [f64; 4], n: f64, s: &SlicedDerivativeSettings) -> ([f64; 4], [f64; 4]) {
    let center = f(0.0);
    let k = s.fd_steps.len();
    let mut diffs = vec![[0.0; 4]; k];
    let mut hk = vec![0.0; k];
    for (i, step) in s.fd_steps.iter().enumerate() {
        let h = step / n;
        let (fp, fm) = (f(h), f(-h));
        for j in 0..4 {
            diffs[i][j] = (fp[j] - 2.0 * center[j] + fm[j]) / (h * h);
        }
        hk[i] = h.powi(s.richardson_order as i32);
    }
    let mut best = [0.0; 4];
    let mut noise = [0.0; 4];
    for j in 0..4 {
        let col: Vec<f64> = diffs.iter().map(|d| d[j]).collect();
        best[j] = neville(&col, &hk);
        noise[j] = (best[j] - neville(&col[..k - 1], &hk[..k - 1])).abs();
    }
    (best, noise)
}

/// sum_{n > big_n} n^-s by Euler-Maclaurin.
fn power_tail(s: i32, big_n: f64) -> f64 {
    let sf = f64::from(s);
    big_n.powf(1.0 - sf) / (sf - 1.0) - big_n.powf(-sf) / 2.0 + sf * big_n.powf(-sf - 1.0) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * big_n.powf(-sf - 3.0) / 720.0
}

/// Least-squares fit of c2/n^2 + c3/n^3 + c4/n^4 to the last half of the
/// terms, summed analytically beyond the last one.
fn fitted_tail(terms: &[f64]) -> f64 {
    let big_n = terms.len();
    let start = big_n / 2;
    let rows = big_n - start;
    let mut a = DMatrix::zeros(rows, 3);
    let mut y = DVector::zeros(rows);
    for (r, idx) in (start..big_n).enumerate() {
        let n = (idx + 1) as f64;
        // Columns scaled by n^2 keep the system well conditioned.
        for (c, pow) in [2, 3, 4].iter().enumerate() {
            a[(r, c)] = n.powi(2 - pow);
        }
        y[r] = terms[idx] * n * n;
    }
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .unwrap_or_else(|_| DVector::zeros(3));
    let nf = big_n as f64;
    coef[0] * power_tail(2, nf) + coef[1] * power_tail(3, nf) + coef[2] * power_tail(4, nf)
}

fn anchor(phi: &Phi, a: f64, b: f64) -> Anchor {
    let t0 = b - a;
    Anchor {
        t0,
        p: phi.value(t0),
        p1: phi.d1(t0),
        p2: phi.d2(t0),
        big_p: phi.primitive(t0),
    }
}

fn check_inputs(a: f64, b: f64, phi: &Phi) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("need a, b > 0, got ({a}, {b})")));
    }
    phi.check_positive(b - a - b, b - a + a)
}

pub fn sliced_f3(a: f64, b: f64, phi: &Phi, s: &SlicedDerivativeSettings) -> Result<SlicedF3> {
    check_inputs(a, b, phi)?;
    s.validate()?;
    let at = anchor(phi, a, b);
    let lo = at.t0 - b;
    let decay = (0..=2000)
        .map(|i| phi.value(lo + (a + b) * f64::from(i) / 2000.0))
        .fold(f64::INFINITY, f64::min);
    let gl = gauss_legendre(s.gl_points);
    let ab = a * b;

    let per_term: Vec<([f64; 4], f64)> = (1..=s.n_terms)
        .into_par_iter()
        .map(|n| {
            let minus = Side::new(phi, &at, -1.0, b, n, decay, &gl, s.panels);
            let plus = Side::new(phi, &at, 1.0, a, n, decay, &gl, s.panels);
            let nf = n as f64;
            let (d, noise) = second_derivatives(|e| pieces(&at, &minus, &plus, a, b, nf, e), nf, s);
            let w = [1.0 / (ab * at.p * at.p * nf.powi(3)), 1.0 / (ab * nf), 1.0 / (ab * nf), 1.0 / (ab * nf)];
            let mut c = [0.0; 4];
            let mut nz = 0.0;
            for j in 0..4 {
                c[j] = d[j] * w[j] / 2.0;
                nz += noise[j] * w[j] / 2.0;
            }
            (c, nz)
        })
        .collect();

    let mut series = [NeumaierSum::new(); 4];
    let mut noise = 0.0;
    let mut totals = Vec::with_capacity(per_term.len());
    for (c, nz) in &per_term {
        for j in 0..4 {
            series[j] += c[j];
        }
        noise += nz;
        totals.push(c.iter().sum::<f64>());
    }
    let tail = fitted_tail(&totals);

    let big_c = constant()?;
    let l2 = ln_one_minus_exp(a * at.p) + ln_one_minus_exp(b * at.p) - ln_one_minus_exp((a + b) * at.p);
    let base_table = (at.p.ln() / 12.0 + big_c / 2.0 - l2 / 12.0 - 0.125) / ab;
    let series = series.map(|x| x.value());
    let table = base_table + series.iter().sum::<f64>() + tail;
    // The tables use +ln Z / V; flip to the library convention.
    let out = SlicedF3 {
        value: -table,
        base: -base_table,
        series: series.map(|x| -x),
        tail: -tail,
        noise,
    };
    if noise > 1e-3 * out.value.abs() {
        return Err(Error::DerivativeNoise { noise, limit: 1e-3 * out.value.abs() });
    }
    Ok(out)
}

/// integral over [0, a] x [0, b] of ln(y + z), in closed form.
fn log_sum_integral(a: f64, b: f64) -> f64 {
    let xlx = |x: f64| x * x * x.ln();
    0.5 * (xlx(a + b) - xlx(a) - xlx(b)) - 1.5 * a * b
}

/// Leading coefficient f0 (in the -ln Z / V convention).
///
/// The integrand -ln(1 - e^-s) with s = Phi(t0 + z) - Phi(t0 - y) is split as
/// -ln(y + z) - ln(s / (y + z)) + ln(s / (1 - e^-s)); the first piece is
/// integrated exactly and the other two are analytic, so a product
/// Gauss-Legendre rule converges geometrically.
pub fn sliced_f0(a: f64, b: f64, phi: &Phi) -> Result<f64> {
    check_inputs(a, b, phi)?;
    let at = anchor(phi, a, b);
    let gl = gauss_legendre(20);
    let grid = |len: f64| -> Vec<(f64, f64)> {
        const PANELS: usize = 12;
        let h = len / PANELS as f64;
        (0..PANELS)
            .flat_map(|k| {
                let c = (k as f64 + 0.5) * h;
                gl.0.iter().zip(&gl.1).map(move |(x, w)| (c + 0.5 * h * x, 0.5 * h * w))
            })
            .collect()
    };
    let ys = grid(b);
    let zs = grid(a);
    let smooth: f64 = ys
        .par_iter()
        .map(|&(y, wy)| {
            let lower = phi.primitive(at.t0 - y);
            let mut acc = NeumaierSum::new();
            for &(z, wz) in &zs {
                let s = phi.primitive(at.t0 + z) - lower;
                acc += wz * (u(s).ln() - (s / (y + z)).ln());
            }
            wy * acc.value()
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .collect::<NeumaierSum>()
        .value();
    let table = (smooth - log_sum_integral(a, b)) / (a * b);
    Ok(-table)
}

pub fn coeffs_sliced(a: f64, b: f64, phi: &Phi, s: &SlicedDerivativeSettings) -> Result<ExpansionCoefficients> {
    Ok(ExpansionCoefficients {
        f0: sliced_f0(a, b, phi)?,
        f1: 0.0,
        f2: -1.0 / (12.0 * a * b),
        f3: sliced_f3(a, b, phi, s)?.value,
        scenario: Scenario::Sliced,
        provenance: Provenance::Analytic,
    })
}

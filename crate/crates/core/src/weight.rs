//! Weight specifications: a uniform q or a smooth slice profile phi(t).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    Uniform { q: f64 },
    Sliced(Phi),
}

impl WeightSpec {
    pub fn uniform(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidArgument(format!("q = {q} outside (0, 1]")));
        }
        Ok(Self::Uniform { q })
    }
}

/// Slice-weight profile. Every variant provides phi, phi', phi'' and an
/// antiderivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "lowercase")]
pub enum Phi {
    Const { c: f64 },
    Linear { alpha: f64, beta: f64 },
    /// (2 + cos t) / 3
    Cosine,
    Tabulated(Spline),
}

impl Phi {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Phi::Const { c } => *c,
            Phi::Linear { alpha, beta } => alpha + beta * t,
            Phi::Cosine => (2.0 + t.cos()) / 3.0,
            Phi::Tabulated(s) => s.eval(t)[0],
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match self {
            Phi::Const { .. } => 0.0,
            Phi::Linear { beta, .. } => *beta,
            Phi::Cosine => -t.sin() / 3.0,
            Phi::Tabulated(s) => s.eval(t)[1],
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match self {
            Phi::Const { .. } | Phi::Linear { .. } => 0.0,
            Phi::Cosine => -t.cos() / 3.0,
            Phi::Tabulated(s) => s.eval(t)[2],
        }
    }

    /// Some antiderivative; only differences are ever used.
    pub fn primitive(&self, t: f64) -> f64 {
        match self {
            Phi::Const { c } => c * t,
            Phi::Linear { alpha, beta } => alpha * t + 0.5 * beta * t * t,
            Phi::Cosine => (2.0 * t + t.sin()) / 3.0,
            Phi::Tabulated(s) => s.primitive(t),
        }
    }

    /// Checks phi > 0 on [lo, hi] (and, for tables, that the range is covered).
    pub fn check_positive(&self, lo: f64, hi: f64) -> Result<()> {
        if let Phi::Tabulated(s) = self {
            let (t0, t1) = s.range();
            if lo < t0 - 1e-12 || hi > t1 + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "tabulated phi covers [{t0}, {t1}], need [{lo}, {hi}]"
                )));
            }
        }
        const SAMPLES: usize = 2000;
        let min = (0..=SAMPLES)
            .map(|i| self.value(lo + (hi - lo) * i as f64 / SAMPLES as f64))
            .fold(f64::INFINITY, f64::min);
        if !(min > 0.0) || !min.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "phi = {self} is not positive on [{lo}, {hi}] (min {min})"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::Const { c } => write!(f, "const:{c}"),
            Phi::Linear { alpha, beta } => write!(f, "linear:{alpha},{beta}"),
            Phi::Cosine => write!(f, "cosine"),
            Phi::Tabulated(s) => write!(f, "tabulated[{} knots]", s.t.len()),
        }
    }
}

/// Parses catalog ids `const:c`, `linear:alpha,beta` and `cosine`.
/// Tabulated profiles are built with [`Spline::natural`].
impl FromStr for Phi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (id, params) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if params.trim().is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("bad phi parameter in '{s}': {e}")))?
        };
        match (id.trim(), nums.as_slice()) {
            ("const", [c]) => Ok(Phi::Const { c: *c }),
            ("linear", [alpha, beta]) => Ok(Phi::Linear { alpha: *alpha, beta: *beta }),
            ("cosine", []) => Ok(Phi::Cosine),
            _ => Err(Error::InvalidArgument(format!(
                "unknown phi '{s}' (expected const:c, linear:alpha,beta or cosine)"
            ))),
        }
    }
}

/// Natural cubic spline through (t_i, y_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spline {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
    /// Integral from t[0] to each knot.
    cum: Vec<f64>,
}

impl Spline {
    pub fn natural(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 3 || y.len() != n {
            return Err(Error::InvalidArgument("a spline needs at least 3 (t, y) pairs".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("spline knots must be strictly increasing".into()));
        }
        // Tridiagonal solve for interior second derivatives (Thomas algorithm).
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = t[i] - t[i - 1];
            let h1 = t[i + 1] - t[i];
            let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        let mut cum = vec![0.0; n];
        for i in 1..n {
            let h = t[i] - t[i - 1];
            cum[i] = cum[i - 1] + h * (y[i] + y[i - 1]) / 2.0 - h.powi(3) * (m[i] + m[i - 1]) / 24.0;
        }
        Ok(Self { t, y, m, cum })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn interval(&self, x: f64) -> usize {
        let i = self.t.partition_point(|&k| k <= x);
        i.clamp(1, self.t.len() - 1) - 1
    }

    /// [s, s', s''] at x (extrapolating the end cubics outside the range).
    fn eval(&self, x: f64) -> [f64; 3] {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let (a, b) = ((self.t[i + 1] - x) / h, (x - self.t[i]) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let dv = (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0
            + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        [v, dv, a * m0 + b * m1]
    }

    fn primitive(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        // Integrate from t[i] to x in terms of b = (x - t_i)/h, a = 1 - b.
        let b = (x - self.t[i]) / h;
        let a = 1.0 - b;
        let lin = h * (self.y[i] * (1.0 - a * a) / 2.0 + self.y[i + 1] * b * b / 2.0);
        let cub = h * h * h / 6.0
            * (m0 * ((1.0 - a.powi(4)) / 4.0 - (1.0 - a * a) / 2.0)
                + m1 * (b.powi(4) / 4.0 - b * b / 2.0));
        self.cum[i] + lin + cub
    }
}

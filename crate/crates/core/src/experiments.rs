//! End-to-end runs shared by the command line and the test suites.

use crate::asymptotics::{
    coeffs_finite, coeffs_infinite, coeffs_sliced, constant, log_combination, log_series,
    ExpansionCoefficients, Scenario, SlicedDerivativeSettings,
};
use crate::error::{Error, Result};
use crate::fitting::{fit, residual_slope, residual_slope_in, sample_grid, FitBasis, FitResult};
use crate::kasteleyn::kasteleyn_partition;
use crate::model::{oracle_partition_with, BoxShape, OracleLimits, ScaledShape};
use crate::partition::{
    log_z_infinite_beta, log_z_macmahon, log_z_sliced, scaling_free_energy, series_free_energy,
    FreeEnergySample, SeriesSettings,
};
use crate::special::{chi, chi_dd, li, q_func, zeta};
use crate::weight::Phi;
use rayon::prelude::*;
use serde::Serialize;

/// A family of boxes in the scaling limit, parametrised by 1/eps.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "scenario", rename_all = "lowercase")]
pub enum Problem {
    Finite { a: f64, b: f64, c: f64 },
    Infinite { a: f64, b: f64 },
    Sliced { a: f64, b: f64, phi: Phi },
}

impl Problem {
    pub fn scenario(&self) -> Scenario {
        match self {
            Problem::Finite { .. } => Scenario::Finite,
            Problem::Infinite { .. } => Scenario::Infinite,
            Problem::Sliced { .. } => Scenario::Sliced,
        }
    }

    pub fn ab(&self) -> (f64, f64) {
        match *self {
            Problem::Finite { a, b, .. } | Problem::Infinite { a, b } | Problem::Sliced { a, b, .. } => (a, b),
        }
    }

    pub fn scaled(&self, inv_eps: u32) -> Result<ScaledShape> {
        let eps = 1.0 / f64::from(inv_eps);
        match *self {
            Problem::Finite { a, b, c } => ScaledShape::finite(a, b, c, eps),
            Problem::Infinite { a, b } | Problem::Sliced { a, b, .. } => ScaledShape::infinite(a, b, eps),
        }
    }

    /// Exact -ln Z / V at mesh 1/inv_eps (uniform cases at q = e^-eps).
    pub fn exact(&self, inv_eps: u32) -> Result<FreeEnergySample> {
        let shape = self.scaled(inv_eps)?;
        let f = match self {
            Problem::Sliced { phi, .. } => {
                let lattice = shape.to_box()?;
                -log_z_sliced(lattice.m, lattice.n, phi, shape.eps)? / lattice.volume()
            }
            _ => scaling_free_energy(&shape)?,
        };
        Ok(FreeEnergySample { inv_eps, eps: shape.eps, f })
    }

    /// Samples over a grid, computed in parallel and returned in grid order.
    pub fn samples(&self, grid: &[u32]) -> Result<Vec<FreeEnergySample>> {
        if let Problem::Sliced { a, b, phi } = self {
            phi.check_positive(-a, *b)?;
        }
        grid.par_iter().map(|&i| self.exact(i)).collect()
    }

    pub fn analytic(&self, s: &SlicedDerivativeSettings) -> Result<ExpansionCoefficients> {
        match self {
            Problem::Finite { a, b, c } => coeffs_finite(*a, *b, *c),
            Problem::Infinite { a, b } => coeffs_infinite(*a, *b),
            Problem::Sliced { a, b, phi } => coeffs_sliced(*a, *b, phi, s),
        }
    }
}

/// One configuration of the slice-weight comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub a: f64,
    pub b: f64,
    pub phi: Phi,
}

impl TableRow {
    pub fn problem(&self) -> Problem {
        Problem::Sliced { a: self.a, b: self.b, phi: self.phi.clone() }
    }

    /// Parses `cosine:a,b` or `linear:a,b`; the linear profile is a + t/2.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("row '{spec}' is not cosine:a,b or linear:a,b"));
        let (id, ab) = spec.split_once(':').ok_or_else(bad)?;
        let (a, b) = ab.split_once(',').ok_or_else(bad)?;
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        let phi = match id {
            "cosine" => Phi::Cosine,
            "linear" => Phi::Linear { alpha: a, beta: 0.5 },
            _ => return Err(bad()),
        };
        Ok(Self { label: format!("{id}:{a},{b}"), a, b, phi })
    }
}

pub fn table1_rows() -> Vec<TableRow> {
    ["cosine:1,3", "cosine:2,3", "linear:1,3", "linear:2,3"]
        .iter()
        .map(|s| TableRow::parse(s).expect("built-in rows parse"))
        .collect()
}

/// Fitted and analytic coefficients for one row, in the +ln Z / V convention
/// customary for such tables (so 12 a b f2 -> 1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableResult {
    pub row: TableRow,
    pub fitted: ExpansionCoefficients,
    pub analytic: ExpansionCoefficients,
    pub fit: FitResult,
}

pub fn run_table_row(
    row: &TableRow,
    inv_eps_min: u32,
    inv_eps_max: u32,
    s: &SlicedDerivativeSettings,
) -> Result<TableResult> {
    let problem = row.problem();
    let samples = problem.samples(&sample_grid(inv_eps_min, inv_eps_max)?)?;
    let flipped: Vec<FreeEnergySample> =
        samples.iter().map(|x| FreeEnergySample { f: -x.f, ..*x }).collect();
    let fit = fit(&flipped, &FitBasis::default())?;
    Ok(TableResult {
        row: row.clone(),
        fitted: fit.expansion(Scenario::Sliced),
        analytic: problem.analytic(s)?.negated(),
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRun {
    pub samples: Vec<FreeEnergySample>,
    pub fit: FitResult,
    pub analytic: ExpansionCoefficients,
    /// Residual slope against the analytic coefficients over 1/eps >= 20.
    pub analytic_slope: Option<f64>,
}

/// Fit of an arbitrary problem in the library convention, with analytic values.
pub fn run_fit(
    problem: &Problem,
    inv_eps_min: u32,
    inv_eps_max: u32,
    basis: &FitBasis,
    s: &SlicedDerivativeSettings,
) -> Result<FitRun> {
    let samples = problem.samples(&sample_grid(inv_eps_min, inv_eps_max)?)?;
    let fit = fit(&samples, basis)?;
    let analytic = problem.analytic(s)?;
    let analytic_slope = residual_slope(&samples, &analytic).ok();
    Ok(FitRun { samples, fit, analytic, analytic_slope })
}

/// Residual slope of the exact free energy against the analytic prediction.
pub fn residual_scaling(problem: &Problem, lo: u32, hi: u32, s: &SlicedDerivativeSettings) -> Result<f64> {
    let samples = problem.samples(&sample_grid(lo, hi)?)?;
    residual_slope_in(&samples, &problem.analytic(s)?, lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    /// Observed discrepancy (or value) compared against `tolerance`.
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(suite: &str, name: String, error: f64, tolerance: f64) -> Self {
        Self { suite: suite.into(), name, error, tolerance, pass: error <= tolerance }
    }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

/// Enumeration, MacMahon product and Kasteleyn determinant agree pairwise.
pub fn verify_oracles(max_side: u32, tol: f64) -> Result<Vec<Check>> {
    verify_oracles_with(max_side, tol, OracleLimits::default())
}

pub fn verify_oracles_with(max_side: u32, tol: f64, limits: OracleLimits) -> Result<Vec<Check>> {
    let mut cases = Vec::new();
    for m in 1..=max_side {
        for n in 1..=max_side {
            for k in 1..=max_side {
                for q in [0.3, 0.5, 0.9] {
                    cases.push((m, n, k, q));
                }
            }
        }
    }
    cases
        .par_iter()
        .map(|&(m, n, k, q)| {
            let shape = BoxShape::new(m, n, k)?;
            let z_enum = oracle_partition_with(shape, q, limits)?;
            let z_mac = log_z_macmahon(shape, q)?.exp();
            let z_kas = kasteleyn_partition(shape, q)?;
            let err = rel(z_mac, z_enum).max(rel(z_kas, z_enum)).max(rel(z_kas, z_mac));
            Ok(Check::new("oracles", format!("{shape} q={q}"), err, tol))
        })
        .collect()
}

/// Product formula and resummed series give the same free energy.
pub fn verify_dual_evaluators(tol: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let settings = SeriesSettings::default();
    let finite = [(1.0, 1.0, 1.0), (3.0, 2.0, 1.0)];
    let infinite = [(1.0, 1.0), (2.0, 1.0)];
    for inv in [10u32, 50, 100] {
        let eps = 1.0 / f64::from(inv);
        for &(a, b, c) in &finite {
            let s = ScaledShape::finite(a, b, c, eps)?;
            let err = (series_free_energy(&s, &settings)? - scaling_free_energy(&s)?).abs();
            out.push(Check::new("dual", format!("finite {a},{b},{c} 1/eps={inv}"), err, tol));
        }
        for &(a, b) in &infinite {
            let s = ScaledShape::infinite(a, b, eps)?;
            let err = (series_free_energy(&s, &settings)? - scaling_free_energy(&s)?).abs();
            out.push(Check::new("dual", format!("infinite {a},{b} 1/eps={inv}"), err, tol));
        }
    }
    Ok(out)
}

/// Constant profiles reduce the slice-weighted case to the uniform one.
pub fn verify_constant_phi(s: &SlicedDerivativeSettings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (a, b) in [(1.0, 3.0), (2.0, 3.0)] {
        let sliced = coeffs_sliced(a, b, &Phi::Const { c: 1.0 }, s)?;
        let plain = coeffs_infinite(a, b)?;
        let tag = format!("a={a},b={b}");
        out.push(Check::new("constant-phi", format!("f0 {tag}"), (sliced.f0 - plain.f0).abs(), 1e-10));
        out.push(Check::new("constant-phi", format!("f1 {tag}"), (sliced.f1 - plain.f1).abs(), 0.0));
        out.push(Check::new("constant-phi", format!("f2 {tag}"), (sliced.f2 - plain.f2).abs(), 1e-12));
        out.push(Check::new("constant-phi", format!("f3 {tag}"), (sliced.f3 - plain.f3).abs(), 5e-4));
    }
    for (m, n, c) in [(2u32, 3u32, 1.0), (4, 4, 1.0), (3, 5, 0.7)] {
        let eps = 0.25;
        let sliced = log_z_sliced(m, n, &Phi::Const { c }, eps)?;
        let plain = log_z_infinite_beta(m, n, eps * c)?;
        out.push(Check::new(
            "constant-phi",
            format!("ln Z {m}x{n} phi={c}"),
            rel(sliced, plain),
            1e-12,
        ));
    }
    Ok(out)
}

/// Spot checks of the special functions.
pub fn verify_special() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let even = (-100..=100)
        .map(|i| f64::from(i) / 10.0)
        .map(|z| (chi(z) - chi(-z)).abs())
        .fold(0.0, f64::max);
    out.push(Check::new("special", "chi even on [-10, 10]".into(), even, 1e-12));
    let taylor = [0.05, 0.1, 0.2, 0.3, 0.5]
        .iter()
        .map(|&z: &f64| (chi(z) - (1.0 - z * z / 12.0 + z.powi(4) / 240.0)).abs() / z.powi(6))
        .fold(0.0, f64::max);
    out.push(Check::new("special", "chi Taylor remainder / z^6".into(), taylor, 1e-3));
    out.push(Check::new("special", "chi''(0) = -1/6".into(), (chi_dd(0.0) + 1.0 / 6.0).abs(), 1e-15));
    out.push(Check::new("special", "Q(0) = -1/6".into(), (q_func(0.0) + 1.0 / 6.0).abs(), 1e-15));
    let z3 = (li(3, 1.0)? - 1.202_056_903_159_594_3).abs();
    out.push(Check::new("special", "Li3(1) = zeta(3)".into(), z3, 1e-10));
    out.push(Check::new("special", "zeta(3) via li".into(), (li(3, 1.0)? - zeta(3)?).abs(), 0.0));
    let sides = [1.0, 2.0, 3.0];
    let log_id = (log_series(&sides, 200) - log_combination(&sides)).abs();
    out.push(Check::new("special", "log series identity (1,2,3)".into(), log_id, 1e-10));
    let c = constant()?;
    out.push(Check::new("special", "universal constant".into(), (c + 0.080842).abs(), 5e-6));
    Ok(out)
}

use crate::args::*;
use crate::output::Report;
use crate::settings::Settings;
use anyhow::{anyhow, bail, Context, Result};
use hexdimer::experiments::{
    run_fit, run_table_row, table1_rows, verify_constant_phi, verify_dual_evaluators,
    verify_oracles_with, verify_special, Check, Problem, TableRow,
};
use hexdimer::fitting::{BasisTerm, FitBasis};
use hexdimer::kasteleyn::{build_embedding, kasteleyn_log_partition};
use hexdimer::model::{oracle_partition_with, BoxShape, Height};
use hexdimer::partition::{log_z_infinite, log_z_macmahon, log_z_sliced};
use hexdimer::special::universal_constant;
use hexdimer::weight::{Phi, Spline};
use serde_json::{json, Value};
use std::fmt;

/// Marker for a configuration the user got wrong (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Marker for a failed oracle suite (exit code 3).
#[derive(Debug)]
pub struct VerificationFailed(pub usize);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} verification check(s) failed", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

pub fn parse_phi(spec: &str) -> Result<Phi> {
    if let Some(path) = spec.strip_prefix("tabulated:") {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| usage(format!("cannot read {path}: {e}")))?;
        let (mut t, mut y) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| usage(format!("{path}: {e}")))?;
            let pair = (rec.get(0).map(str::parse::<f64>), rec.get(1).map(str::parse::<f64>));
            match pair {
                (Some(Ok(a)), Some(Ok(b))) => {
                    t.push(a);
                    y.push(b);
                }
                // Tolerate a header line.
                _ if i == 0 => continue,
                _ => return Err(usage(format!("{path}: line {} is not two numbers", i + 1))),
            }
        }
        return Ok(Phi::Tabulated(Spline::natural(t, y)?));
    }
    Ok(spec.parse::<Phi>()?)
}

fn problem(shape: &ShapeArgs, scenario: Option<ScenarioArg>) -> Result<Problem> {
    let ShapeArgs { a, b, c, ref phi } = *shape;
    let inferred = match (phi, c) {
        (Some(_), Some(_)) => return Err(usage("--phi applies to unbounded height; drop --c")),
        (Some(_), None) => ScenarioArg::Sliced,
        (None, Some(_)) => ScenarioArg::Finite,
        (None, None) => ScenarioArg::Infinite,
    };
    if let Some(s) = scenario {
        if s != inferred {
            return Err(usage(format!(
                "--scenario {} is inconsistent with the given flags (they describe {}); \
                 finite needs --c, sliced needs --phi",
                format!("{s:?}").to_lowercase(),
                format!("{inferred:?}").to_lowercase()
            )));
        }
    }
    Ok(match inferred {
        ScenarioArg::Finite => Problem::Finite { a, b, c: c.unwrap_or_default() },
        ScenarioArg::Infinite => Problem::Infinite { a, b },
        ScenarioArg::Sliced => Problem::Sliced { a, b, phi: parse_phi(phi.as_deref().unwrap_or_default())? },
    })
}

fn describe(p: &Problem) -> String {
    match p {
        Problem::Finite { a, b, c } => format!("a={a} b={b} c={c}"),
        Problem::Infinite { a, b } => format!("a={a} b={b} c=inf"),
        Problem::Sliced { a, b, phi } => format!("a={a} b={b} phi={phi}"),
    }
}

fn variant(p: &Problem) -> &'static str {
    match p {
        Problem::Finite { .. } => "finite",
        Problem::Infinite { .. } => "infinite",
        Problem::Sliced { .. } => "sliced",
    }
}

pub fn partition(args: &PartitionArgs, s: &Settings, cmd: &str) -> Result<Report> {
    let mut rep = Report::new(cmd, &["method", "log_z", "z"]);
    let k = match args.k.as_deref() {
        None | Some("inf") => Height::Infinite,
        Some(v) => Height::Finite(v.parse().map_err(|_| usage(format!("--K expects an integer or 'inf', got '{v}'")))?),
    };
    let shape = match k {
        Height::Finite(k) => BoxShape::new(args.m, args.n, k)?,
        Height::Infinite => BoxShape::infinite(args.m, args.n)?,
    };
    rep.meta("shape", shape.to_string());
    let push = |rep: &mut Report, method: &str, log_z: f64, z: f64| {
        rep.push(vec![json!(method), json!(log_z), json!(z)]);
    };
    if let Some(spec) = &args.phi {
        if k != Height::Infinite {
            return Err(usage("slice weights need an unbounded box (omit --K)"));
        }
        if args.q.is_some() {
            return Err(usage("give either --q or --phi, not both"));
        }
        let inv = args.inv_eps.ok_or_else(|| usage("--phi needs --inv-eps"))?;
        let phi = parse_phi(spec)?;
        let eps = 1.0 / f64::from(inv);
        let (a, b) = (f64::from(args.m) * eps, f64::from(args.n) * eps);
        phi.check_positive(-a, b)?;
        rep.meta("weights", format!("phi={phi} eps=1/{inv}"));
        let log_z = log_z_sliced(args.m, args.n, &phi, eps)?;
        push(&mut rep, "sliced", log_z, log_z.exp());
        return Ok(rep);
    }
    let q = args.q.ok_or_else(|| usage("give --q (uniform) or --phi with --inv-eps"))?;
    rep.meta("weights", format!("q={q}"));
    match k {
        Height::Infinite => {
            let log_z = log_z_infinite(shape, q)?;
            push(&mut rep, "product", log_z, log_z.exp());
        }
        Height::Finite(_) => {
            if q < 1.0 {
                let log_z = log_z_macmahon(shape, q)?;
                push(&mut rep, "macmahon", log_z, log_z.exp());
            }
            if let Ok(z) = oracle_partition_with(shape, q, s.limits) {
                push(&mut rep, "enumeration", z.ln(), z);
            }
            let dim = build_embedding(shape)?.white.len();
            if dim <= 2000 {
                let log_z = kasteleyn_log_partition(shape, q)?;
                push(&mut rep, "kasteleyn", log_z, log_z.exp());
            }
        }
    }
    if rep.rows.is_empty() {
        bail!(UsageError(format!("no method applies to {shape} at q={q}")));
    }
    Ok(rep)
}

pub fn free_energy(args: &ScaledArgs, cmd: &str) -> Result<Report> {
    let p = problem(&args.shape, None)?;
    let g = &args.grid;
    let grid: Vec<u32> = match (g.inv_eps, g.inv_eps_min, g.inv_eps_max) {
        (Some(i), None, None) => vec![i],
        (None, Some(lo), Some(hi)) => hexdimer::fitting::sample_grid(lo, hi)?,
        _ => return Err(usage("give --inv-eps, or both --inv-eps-min and --inv-eps-max")),
    };
    let samples = p.samples(&grid)?;
    let mut rep = Report::new(cmd, &["inv_eps", "eps", "f", "variant", "params"]);
    let params = describe(&p);
    for x in samples {
        rep.push(vec![json!(x.inv_eps), json!(x.eps), json!(x.f), json!(variant(&p)), json!(params)]);
    }
    Ok(rep)
}

pub fn coeffs(args: &CoeffArgs, s: &Settings, cmd: &str) -> Result<Report> {
    let p = problem(&args.shape, args.scenario)?;
    let c = p.analytic(&s.sliced)?;
    let mut rep = Report::new(cmd, &["scenario", "provenance", "f0", "f1", "f2", "f3"]);
    rep.meta("params", describe(&p));
    rep.push(vec![
        json!(variant(&p)),
        json!("analytic"),
        json!(c.f0),
        json!(c.f1),
        json!(c.f2),
        json!(c.f3),
    ]);
    Ok(rep)
}

pub fn fit(args: &FitArgs, s: &Settings, cmd: &str) -> Result<Report> {
    let p = problem(&args.shape, args.scenario)?;
    let basis = FitBasis::default();
    let run = run_fit(&p, args.inv_eps_min, args.inv_eps_max, &basis, &s.sliced)?;
    let (res, analytic) = (&run.fit, run.analytic);
    let mut rep = Report::new(cmd, &["basis_term", "fitted", "analytic", "abs_diff"]);
    rep.meta("params", describe(&p))
        .meta("grid", format!("1/eps = {}..{}", args.inv_eps_min, args.inv_eps_max))
        .meta("residual_rms", format!("{:e}", res.residual_rms))
        .meta("condition_estimate", format!("{:e}", res.condition_estimate))
        .meta(
            "residual_slope_fitted",
            res.residual_slope.map_or("n/a".to_string(), |v| format!("{v}")),
        )
        .meta(
            "residual_slope_analytic",
            run.analytic_slope.map_or("n/a".to_string(), |v| format!("{v}")),
        );
    for (term, &v) in basis.terms.iter().zip(&res.coefficients) {
        let a = match term {
            BasisTerm::One => Some(analytic.f0),
            BasisTerm::Eps => Some(analytic.f1),
            BasisTerm::Eps2Log => Some(analytic.f2),
            BasisTerm::Eps2 => Some(analytic.f3),
            _ => None,
        };
        rep.push(vec![
            json!(term.to_string()),
            json!(v),
            a.map_or(Value::Null, |x| json!(x)),
            a.map_or(Value::Null, |x| json!((v - x).abs())),
        ]);
    }
    Ok(rep)
}

pub fn table1(args: &TableArgs, s: &Settings, cmd: &str) -> Result<Report> {
    let rows: Vec<TableRow> = if args.row.is_empty() {
        table1_rows()
    } else {
        args.row.iter().map(|r| TableRow::parse(r)).collect::<hexdimer::Result<_>>()?
    };
    let mut rep = Report::new(
        cmd,
        &[
            "row", "phi", "a", "b", "f0_analytic", "f0_fitted", "f1_fitted", "12ab_f2_fitted",
            "f3_analytic", "f3_fitted", "f3_abs_diff",
        ],
    );
    rep.meta("table_convention", "coefficients of +ln Z / V (negated library convention), so 12ab f2 = 1")
        .meta("grid", format!("1/eps = {}..{}", args.inv_eps_min, args.inv_eps_max))
        .meta("basis", "1, eps, eps^2 ln eps, eps^2, eps^3, eps^4 (unweighted)");
    for row in &rows {
        let r = run_table_row(row, args.inv_eps_min, args.inv_eps_max, &s.sliced)?;
        let ab = row.a * row.b;
        rep.push(vec![
            json!(row.label),
            json!(row.phi.to_string()),
            json!(row.a),
            json!(row.b),
            json!(r.analytic.f0),
            json!(r.fitted.f0),
            json!(r.fitted.f1),
            json!(12.0 * ab * r.fitted.f2),
            json!(r.analytic.f3),
            json!(r.fitted.f3),
            json!((r.fitted.f3 - r.analytic.f3).abs()),
        ]);
    }
    Ok(rep)
}

pub fn constant(s: &Settings, cmd: &str) -> Result<Report> {
    let c = universal_constant(&s.quadrature)?;
    let mut rep = Report::new(cmd, &["value", "quadrature_error", "tail_bound", "rel_tol", "z_cut"]);
    rep.push(vec![
        json!(c.value),
        json!(c.quadrature_error),
        json!(c.tail_bound),
        json!(s.quadrature.rel_tol),
        json!(s.quadrature.z_cut),
    ]);
    Ok(rep)
}

/// Runs the selected suites; the report is returned even when checks fail.
pub fn verify(args: &VerifyArgs, s: &Settings, cmd: &str) -> Result<(Report, usize)> {
    let all = !(args.kasteleyn || args.dual || args.constant_phi || args.special);
    let mut checks: Vec<Check> = Vec::new();
    if all || args.kasteleyn {
        checks.extend(verify_oracles_with(3, s.oracle_tol, s.limits)?);
    }
    if all || args.dual {
        checks.extend(verify_dual_evaluators(s.dual_tol)?);
    }
    if all || args.constant_phi {
        checks.extend(verify_constant_phi(&s.sliced)?);
    }
    if all || args.special {
        checks.extend(verify_special()?);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut rep = Report::new(cmd, &["suite", "check", "error", "tolerance", "pass"]);
    rep.meta("summary", format!("{} passed, {failed} failed", checks.len() - failed));
    for c in &checks {
        rep.push(vec![
            json!(c.suite),
            json!(c.name),
            json!(c.error),
            json!(c.tolerance),
            json!(if c.pass { "PASS" } else { "FAIL" }),
        ]);
    }
    Ok((rep, failed))
}

pub fn context_for(cmd: &Command) -> &'static str {
    match cmd {
        Command::Partition(_) => "partition",
        Command::FreeEnergy(_) => "free-energy",
        Command::Coeffs(_) => "coeffs",
        Command::Fit(_) => "fit",
        Command::Table1(_) => "table1",
        Command::Constant => "constant",
        Command::Verify(_) => "verify",
    }
}

pub fn with_context<T>(r: Result<T>, name: &str) -> Result<T> {
    r.with_context(|| format!("{name} failed"))
}

use anyhow::{bail, Context, Result};
use hexdimer::asymptotics::SlicedDerivativeSettings;
use hexdimer::model::OracleLimits;
use hexdimer::partition::SeriesSettings;
use hexdimer::special::QuadratureSettings;

/// Numerical settings with `--tol-override` applied.
#[derive(Debug, Clone)]
pub struct Settings {
    pub quadrature: QuadratureSettings,
    pub series: SeriesSettings,
    pub sliced: SlicedDerivativeSettings,
    pub limits: OracleLimits,
    pub oracle_tol: f64,
    pub dual_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSettings::default(),
            series: SeriesSettings::default(),
            sliced: SlicedDerivativeSettings::default(),
            limits: OracleLimits::default(),
            oracle_tol: 1e-9,
            dual_tol: 1e-11,
        }
    }
}

pub const OVERRIDE_NAMES: &str = "rel_tol, z_cut, term_tol, n_max_cap, n_terms, richardson_order, \
     fd_steps (colon-separated), max_cells, max_height, oracle_tol, dual_tol";

impl Settings {
    pub fn from_overrides(items: &[String]) -> Result<Self> {
        let mut s = Self::default();
        for item in items {
            let (name, value) = item
                .split_once('=')
                .with_context(|| format!("--tol-override expects NAME=VALUE, got '{item}'"))?;
            let num = || -> Result<f64> {
                value.trim().parse::<f64>().with_context(|| format!("bad value for {name}: '{value}'"))
            };
            let int = || -> Result<u64> {
                value.trim().parse::<u64>().with_context(|| format!("bad integer for {name}: '{value}'"))
            };
            match name.trim() {
                "rel_tol" => s.quadrature.rel_tol = num()?,
                "z_cut" => s.quadrature.z_cut = num()?,
                "term_tol" => s.series.term_tol = num()?,
                "n_max_cap" => s.series.n_max_cap = int()?,
                "n_terms" => s.sliced.n_terms = int()? as usize,
                "richardson_order" => s.sliced.richardson_order = int()? as u32,
                "fd_steps" => {
                    s.sliced.fd_steps = value
                        .split(':')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .with_context(|| format!("bad fd_steps '{value}'"))?
                }
                "max_cells" => s.limits.max_cells = int()? as u32,
                "max_height" => s.limits.max_height = int()? as u32,
                "oracle_tol" => s.oracle_tol = num()?,
                "dual_tol" => s.dual_tol = num()?,
                other => bail!("unknown setting '{other}' (known: {OVERRIDE_NAMES})"),
            }
        }
        Ok(s)
    }
}

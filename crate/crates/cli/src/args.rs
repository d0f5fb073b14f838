use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "hexdimer", version, about = "Hexagonal dimer model: exact partition functions and finite-size expansions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Cap the number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Override a numerical setting, e.g. rel_tol=1e-12 (repeatable).
    #[arg(long = "tol-override", global = true, value_name = "NAME=VALUE")]
    pub tol_override: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact partition function of a lattice box by every applicable method.
    Partition(PartitionArgs),
    /// Exact free energy -ln Z / V for one mesh or a grid of meshes.
    FreeEnergy(ScaledArgs),
    /// Analytic expansion coefficients.
    Coeffs(CoeffArgs),
    /// Fit exact samples and compare with the analytic coefficients.
    Fit(FitArgs),
    /// Reproduce the slice-weight comparison table.
    Table1(TableArgs),
    /// The universal constant: integral of e^-z Q(z) over [0, inf).
    Constant,
    /// Run the oracle suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Finite,
    Infinite,
    Sliced,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long = "M")]
    pub m: u32,
    #[arg(long = "N")]
    pub n: u32,
    /// Height; "inf" for an unbounded box.
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long)]
    pub q: Option<f64>,
    /// Slice-weight profile: const:c, linear:alpha,beta, cosine or tabulated:<file>.
    #[arg(long)]
    pub phi: Option<String>,
    /// Mesh for slice weights.
    #[arg(long = "inv-eps")]
    pub inv_eps: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Height ratio; omit for an unbounded box.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub phi: Option<String>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long = "inv-eps")]
    pub inv_eps: Option<u32>,
    #[arg(long = "inv-eps-min")]
    pub inv_eps_min: Option<u32>,
    #[arg(long = "inv-eps-max")]
    pub inv_eps_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ScaledArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioArg>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long = "inv-eps-min", default_value_t = 2)]
    pub inv_eps_min: u32,
    #[arg(long = "inv-eps-max", default_value_t = 200)]
    pub inv_eps_max: u32,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Row as cosine:a,b or linear:a,b (repeatable); all four by default.
    #[arg(long)]
    pub row: Vec<String>,
    #[arg(long = "inv-eps-min", default_value_t = 2)]
    pub inv_eps_min: u32,
    #[arg(long = "inv-eps-max", default_value_t = 200)]
    pub inv_eps_max: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Enumeration vs MacMahon vs Kasteleyn sweep.
    #[arg(long)]
    pub kasteleyn: bool,
    /// Product formula vs resummed series.
    #[arg(long)]
    pub dual: bool,
    /// Constant slice profile vs uniform weights.
    #[arg(long = "constant-phi")]
    pub constant_phi: bool,
    /// Special-function spot checks.
    #[arg(long)]
    pub special: bool,
}

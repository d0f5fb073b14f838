mod args;
mod commands;
mod output;
mod settings;

use anyhow::Result;
use args::{Cli, Command};
use clap::Parser;
use commands::{UsageError, VerificationFailed};
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<VerificationFailed>() {
            return EXIT_VERIFY;
        }
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<hexdimer::Error>() {
            return match e {
                hexdimer::Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_NUMERICAL,
            };
        }
    }
    EXIT_USAGE
}

/// Reconstructed command line for the metadata header (global flags excluded
/// so that --out does not change file contents).
fn command_line() -> String {
    let mut parts = Vec::new();
    let mut skip = false;
    for a in std::env::args().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--threads" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--threads=") {
            continue;
        }
        parts.push(a);
    }
    format!("hexdimer {}", parts.join(" "))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| UsageError(format!("--threads: {e}")))?;
    }
    let settings = settings::Settings::from_overrides(&cli.tol_override)
        .map_err(|e| UsageError(format!("{e:#}")))?;
    let cmd = command_line();
    let name = commands::context_for(&cli.command);
    let report = match &cli.command {
        Command::Partition(a) => commands::partition(a, &settings, &cmd),
        Command::FreeEnergy(a) => commands::free_energy(a, &cmd),
        Command::Coeffs(a) => commands::coeffs(a, &settings, &cmd),
        Command::Fit(a) => commands::fit(a, &settings, &cmd),
        Command::Table1(a) => commands::table1(a, &settings, &cmd),
        Command::Constant => commands::constant(&settings, &cmd),
        Command::Verify(a) => {
            let (rep, failed) = commands::with_context(commands::verify(a, &settings, &cmd), name)?;
            rep.emit(cli.json, cli.out.as_deref())?;
            if failed > 0 {
                return Err(VerificationFailed(failed).into());
            }
            return Ok(());
        }
    };
    commands::with_context(report, name)?.emit(cli.json, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! Scenario-driven command-line front end.

use clap::Parser;
use ktlab::runner::{run_config, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Numerical laboratory for semigroup decay rates: run scenario sweeps,
/// dominating-function construction, and rate-theorem checks, emitting CSV
/// data and verification reports.
#[derive(Parser)]
#[command(name = "ktlab", version)]
struct Cli {
    /// Scenario configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory; one subdirectory per scenario.
    #[arg(long)]
    out: PathBuf,

    /// Run only the scenario with this name.
    #[arg(long)]
    scenario: Option<String>,

    /// Treat inconclusive checks as failures (exit code 3).
    #[arg(long)]
    strict: bool,

    /// Double every grid's points per decade (stability studies).
    #[arg(long)]
    refine: bool,

    /// Seed for the randomized norm oracles.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions::new(cli.out)
        .filter(cli.scenario)
        .strict(cli.strict)
        .refine(cli.refine)
        .seed(cli.seed);
    ExitCode::from(run_config(&cli.config, &opts) as u8)
}

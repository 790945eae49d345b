//! Command-line driver for the sphere-chain dynamics library.
//!
//! Three subcommands share one scenario file format: `run` integrates a
//! single formulation and writes a trajectory CSV plus a JSON summary,
//! `check` exercises the numerical self-checks against the configured
//! model, and `compare` integrates all four formulations side by side
//! and reports how far apart they drift.
//!
//! Exit codes: 0 success, 1 I/O error, 2 bad usage or bad scenario
//! file, 3 numerical failure during integration, 4 a check or
//! comparison ran fine but its verdict is a fail.

mod check;
mod compare;
mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// A command that could not complete, tagged with the exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Filesystem trouble: unreadable config, unwritable output.
    Io(String),
    /// The scenario file is malformed or describes an invalid setup.
    Config(String),
    /// The integration itself broke down.
    Numerical(String),
    /// Checks or comparisons completed and the answer is "no".
    Verdict(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Verdict(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Config(m) | Failure::Numerical(m) | Failure::Verdict(m) => m,
        }
    }
}

/// Map library errors onto exit classes. Anything stamped with a
/// simulation time went wrong mid-run and counts as numerical; the
/// failure message carries a wall-clock timestamp for log correlation.
pub fn dynamics_failure(e: spheredyn::DynamicsError) -> Failure {
    use spheredyn::DynamicsError::*;
    match e {
        DivergenceDetected { .. }
        | SingularInertia { .. }
        | TangencyViolation { time: Some(_), .. } => Failure::Numerical(format!(
            "numerical failure at {}: {e}",
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
        )),
        other => Failure::Config(other.to_string()),
    }
}

#[derive(Parser)]
#[command(name = "spheredyn", version, about = "Simulate chains of spherical pendulums")]
struct Cli {
    /// Directory for output files. Falls back to $SPHEREDYN_OUTPUT_DIR,
    /// then the current directory.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Suppress progress and report output (errors still go to stderr).
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario; write a trajectory CSV and a JSON summary.
    Run { config: PathBuf },
    /// Run the randomized self-check suite against a scenario's model.
    Check {
        config: PathBuf,
        /// Seed for the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate all four formulations and report their divergence.
    Compare { config: PathBuf },
}

fn output_dir(cli: &Cli) -> PathBuf {
    if let Some(dir) = &cli.output_dir {
        return dir.clone();
    }
    match std::env::var_os("SPHEREDYN_OUTPUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("."),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = output_dir(&cli);
    let result = match &cli.command {
        Command::Run { config } => run::cmd_run(config, &out, cli.quiet),
        Command::Check { config, seed } => check::cmd_check(config, *seed, cli.quiet),
        Command::Compare { config } => compare::cmd_compare(config, &out, cli.quiet),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

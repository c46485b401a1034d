//! Seeded experiment runner over `qenergy-core`.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 a checked bound
//! was violated.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod bounds;
pub mod config;
pub mod control;
pub mod erasure;
pub mod report;
pub mod simon;

use report::{Format, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qenergy", version, about = "Energy accounting experiments for oracle computations")]
pub struct Cli {
    /// JSON file with option values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $QENERGY_OUT_DIR or .]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of tabular output.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite-step erasure of one state.
    Erasure(erasure::ErasureArgs),
    /// Simon's problem: quantum and classical solvers, query bounds.
    Simon(simon::SimonArgs),
    /// Bound calculators: low-temperature table and upper-bound scaling.
    Bounds(bounds::BoundsArgs),
    /// Ladder-controlled gate: fidelity, control entropy and energy.
    Control(control::ControlArgs),
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, PartialEq)]
pub enum Status {
    Ok,
    Violation(String),
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::Violation(msg)) => {
            eprintln!("violation: {msg}");
            EXIT_VIOLATION
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<Status> {
    let out = Output::new(cli.out.clone(), cli.format)?;
    let file = cli.config.as_deref();
    match &cli.command {
        Command::Erasure(a) => erasure::run(&config::merge(a, file)?, &out),
        Command::Simon(a) => simon::run(&config::merge(a, file)?, &out),
        Command::Bounds(a) => bounds::run(&config::merge(a, file)?, &out),
        Command::Control(a) => control::run(&config::merge(a, file)?, &out),
    }
}

//! Command-line interface: `solve`, `sweep` and `sensitivity` over instance
//! files.
//!
//! Exit codes: 0 success, 1 domain/validation/solver error, 2 usage error.
//! Results go to the output stream, diagnostics to the error stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analysis::{self, AnalysisError};
use crate::domain::ProblemInstance;
use crate::io::{self, ParseError, ReportFormat, ReportOptions};
use crate::solver::{solve_equal_risk, SolverConfig, SolverError};

#[derive(Debug, Error)]
enum CliError {
    #[error("failed to read `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: ParseError,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("failed to write output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "equalrisk",
    version,
    about = "Spread an insufficient budget across delayed projects so every project carries the same completion-failure risk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and report the equal-risk allocation
    Solve(SolveArgs),
    /// Re-solve with every delay set to each given value
    Sweep(SweepArgs),
    /// Report budget and delay sensitivities at the solved risk level
    Sensitivity(SensitivityArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Path to the instance file
    instance: PathBuf,

    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,

    /// Decimal places for rendered numbers
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=15))]
    precision: u8,

    /// Convergence tolerance on the risk bracket width
    #[arg(long)]
    risk_tol: Option<f64>,

    /// Acceptable |spend - budget| at termination, in money units
    /// (default: 1e-9 times the budget)
    #[arg(long)]
    budget_tol: Option<f64>,

    /// Maximum root-search iterations
    #[arg(long)]
    max_iter: Option<u32>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Comma-separated delay values to sweep over
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<f64>,
}

#[derive(Debug, Args)]
struct SensitivityArgs {
    #[command(flatten)]
    common: CommonArgs,
}

impl CommonArgs {
    fn report_options(&self) -> ReportOptions {
        ReportOptions {
            format: self.format,
            precision: self.precision as usize,
        }
    }

    fn solver_config(&self) -> SolverConfig {
        let defaults = SolverConfig::default();
        SolverConfig {
            risk_tolerance: self.risk_tol.unwrap_or(defaults.risk_tolerance),
            budget_tolerance: self.budget_tol.or(defaults.budget_tolerance),
            max_iterations: self.max_iter.unwrap_or(defaults.max_iterations),
        }
    }

    fn load_instance(&self) -> Result<ProblemInstance, CliError> {
        load_instance(&self.instance)
    }
}

fn load_instance(path: &Path) -> Result<ProblemInstance, CliError> {
    let source = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    io::parse_instance(&source).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Solve(args) => {
            let instance = args.common.load_instance()?;
            let solution = solve_equal_risk(&instance, &args.common.solver_config())?;
            let report = io::solution_report(&instance, &solution, &args.common.report_options())?;
            out.write_all(report.as_bytes())?;
        }
        Command::Sweep(args) => {
            let instance = args.common.load_instance()?;
            let rows = analysis::sweep_delay(&instance, &args.t, &args.common.solver_config())?;
            let report = io::render_sweep(&rows, &args.common.report_options());
            out.write_all(report.as_bytes())?;
        }
        Command::Sensitivity(args) => {
            let instance = args.common.load_instance()?;
            let solution = solve_equal_risk(&instance, &args.common.solver_config())?;
            let s = analysis::sensitivities(&instance, &solution)?;
            let report = io::render_sensitivities(&instance, &s, &args.common.report_options());
            out.write_all(report.as_bytes())?;
        }
    }
    Ok(())
}

/// Parses `argv` and runs the requested subcommand, writing results to `out`
/// and diagnostics to `err`. Returns the process exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

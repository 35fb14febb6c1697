//! Command-line front end: `solve`, `list` and `verify`.

pub mod config;
mod error;
pub mod list;
pub mod solve;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};

pub use config::{RunConfig, SolveArgs};
pub use error::CliError;
pub use list::cmd_list;
pub use solve::{cmd_solve, SolveOutcome};
pub use verify::{run_checks, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "fracdecomp",
    version,
    about = "Decomposition solvers for time-fractional PDEs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a built-in or file-defined problem and write CSV/plot data.
    Solve(SolveArgs),
    /// List the built-in problems.
    List,
    /// Run the oracle and invariant checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Relative tolerance of the power-rule versus quadrature check.
    #[arg(long, default_value_t = 1e-8)]
    pub quad_tol: f64,
    /// Only run checks whose name contains this text.
    #[arg(long)]
    pub only: Option<String>,
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, errout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(errout, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let result = match cli.command {
        Command::Solve(args) => args.resolve().and_then(|cfg| {
            let outcome = cmd_solve(&cfg)?;
            if !cfg.quiet {
                let _ = write!(out, "{}", solve::summary_table(&outcome, cfg.timing));
                for f in &outcome.files {
                    let _ = writeln!(out, "wrote {}", f.display());
                }
            }
            Ok(0)
        }),
        Command::List => cmd_list().map(|table| {
            let _ = write!(out, "{table}");
            0
        }),
        Command::Verify(args) => {
            let opts = VerifyOptions {
                quad_tol: args.quad_tol,
                only: args.only,
                ..VerifyOptions::default()
            };
            let outcomes = run_checks(&opts);
            let _ = write!(out, "{}", verify::format_outcomes(&outcomes));
            Ok(if outcomes.iter().all(|o| o.passed) {
                0
            } else {
                1
            })
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(errout, "error: {e}");
            e.exit_code()
        }
    }
}

//! Command-line front end for `stabcheck`.
//!
//! [`execute`] runs a parsed command line and returns the report together
//! with the process exit code; `main` only prints.

mod commands;
pub mod report;
mod text;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use stabcheck::equiv::DEFAULT_BUDGET;

pub use commands::CliError;
use report::{CommandEcho, ErrorReport, Payload, Report};

pub const EXIT_SUCCESS: u8 = 0;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;
pub const EXIT_USER_ERROR: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "stabcheck", version, about = "Exact equivalence checking of Clifford protocols")]
pub struct Cli {
    /// Print a JSON report on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Cross-check results against the dense state-vector oracle.
    #[arg(long, global = true)]
    pub verify: bool,
    /// Worker threads for fingerprint rows.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
    /// Maximum fingerprint size in table entries, 4^(inputs + outputs).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two protocols implement the same channel.
    Check {
        lhs: PathBuf,
        #[arg(required_unless_present = "identity")]
        rhs: Option<PathBuf>,
        /// Compare against the identity channel on N qubits.
        #[arg(long, value_name = "N", conflicts_with = "rhs")]
        identity: Option<usize>,
    },
    /// List every measurement branch of a protocol on one basis input.
    Sim {
        path: PathBuf,
        /// Basis element: diag:X, plus:X,Y or iplus:X,Y.
        #[arg(long)]
        input: String,
    },
    /// Export the 4^n basis circuits in canonical order.
    Basis { n: usize },
    /// Exact rank of the basis, expected 4^n.
    Span { n: usize },
    /// Count n-qubit stabilizer states and compare with the basis size.
    Census { n: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Sim { .. } => "sim",
            Command::Basis { .. } => "basis",
            Command::Span { .. } => "span",
            Command::Census { .. } => "census",
        }
    }
}

/// Everything `main` needs to print.
#[derive(Debug)]
pub struct Execution {
    pub report: Report,
    /// Human-readable form of the report.
    pub text: String,
    /// Diagnostics and notes for stderr.
    pub stderr: Vec<String>,
    pub exit_code: u8,
}

pub fn execute(cli: &Cli, args: Vec<String>) -> Execution {
    let start = Instant::now();
    let mut stderr = Vec::new();
    let (result, exit_code) = match commands::run(cli, &mut stderr) {
        Ok((payload, code)) => (payload, code),
        Err(err) => {
            stderr.push(err.rendered());
            let code = err.exit_code();
            (Payload::Error(ErrorReport::from(err)), code)
        }
    };
    let report = Report {
        command: CommandEcho { name: cli.command.name().into(), args },
        result,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    let text = text::render(&report.result);
    Execution { report, text, stderr, exit_code }
}

//! `pel`: query probabilistic epistemic logic models and solve influence
//! diagrams stored as `.pel.json` files.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pel_core::DEFAULT_STATE_CAP;

use pel_cli::commands::{self, CommandError, QueryOptions};

#[derive(Parser)]
#[command(name = "pel", version, about = "Probabilistic epistemic logic over Bayesian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model or influence diagram and list every problem found.
    Validate { path: PathBuf },
    /// Probability that a formula holds.
    Query {
        path: PathBuf,
        formula: String,
        /// Condition on VAR=VALUE (repeatable).
        #[arg(long = "evidence", value_name = "VAR=VALUE")]
        evidence: Vec<String>,
        /// Use brute-force enumeration instead of the indicator network.
        #[arg(long)]
        oracle: bool,
        /// Run both paths and fail if they differ by more than 1e-9.
        #[arg(long)]
        check: bool,
        /// Print relevant observations of each belief and the network.
        #[arg(long)]
        explain: bool,
        /// State-space limit for the enumeration path.
        #[arg(long = "max-states", value_name = "N", default_value_t = DEFAULT_STATE_CAP)]
        max_states: usize,
    },
    /// Probability of a formula after asserting another.
    AssertQuery {
        path: PathBuf,
        assertion: String,
        formula: String,
        #[arg(long = "evidence", value_name = "VAR=VALUE")]
        evidence: Vec<String>,
    },
    /// Optimal policy and maximum expected utility of an influence diagram.
    Solve {
        path: PathBuf,
        /// Write the network with decisions replaced by the policy.
        #[arg(long = "export-bn", value_name = "PATH")]
        export_bn: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    let result = match &cli.command {
        Command::Validate { path } => commands::validate(path, &mut out).map(|clean| if clean { 0 } else { 1 }),
        Command::Query { path, formula, evidence, oracle, check, explain, max_states } => {
            let options = QueryOptions {
                evidence: evidence.clone(),
                oracle: *oracle,
                check: *check,
                explain: *explain,
                max_states: *max_states,
            };
            commands::query(path, formula, &options, &mut out, &mut err).map(|_| 0)
        }
        Command::AssertQuery { path, assertion, formula, evidence } => {
            commands::assert_query(path, assertion, formula, evidence, &mut out, &mut err).map(|_| 0)
        }
        Command::Solve { path, export_bn } => commands::solve(path, export_bn.as_deref(), &mut out, &mut err).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = match e.downcast_ref::<CommandError>() {
                Some(CommandError::InconsistentAssertion(_)) => 3,
                Some(CommandError::Disagreement { .. }) => 4,
                None => 2,
            };
            let _ = writeln!(err, "error: {e:#}");
            ExitCode::from(code)
        }
    }
}

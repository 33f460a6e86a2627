//! Command-line front end for the asymptotic expansion toolkit.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on usage or configuration errors, 3 on numeric failures.

pub mod commands;
pub mod config;
pub mod report;

use clap::{Parser, Subcommand};
use commands::{CommandError, ZagierRoute};
use config::{OutputFormat, Overrides, RunConfig};
use report::Report;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "zeta-asym",
    version,
    about = "Asymptotic expansion of the symmetric power-mean integral"
)]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Largest expansion order accepted by `expand`, and the truncation of `eval-in`.
    #[arg(long, global = true)]
    pub order_cap: Option<u32>,
    /// Number of terms for nested-sum oracles.
    #[arg(long, global = true)]
    pub truncation: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Reduction rule table replacing the embedded one.
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the coefficients with both evaluation paths.
    Coeffs,
    /// Check the integration lemmas over a parameter grid.
    VerifyLemmas {
        #[arg(long, default_value_t = 6)]
        pmax: u32,
        #[arg(long, default_value_t = 5)]
        qmax: u32,
        /// Upper `p` for the shapes that need `p >= 2`.
        #[arg(long, default_value_t = 9)]
        pmax4: u32,
    },
    /// Print the integrand of one order, optionally integrated.
    Expand {
        #[arg(long)]
        order: u32,
        #[arg(long)]
        integrate: bool,
    },
    /// Evaluate I(n) directly and compare with the truncated series.
    EvalIn {
        #[arg(short = 'n', long = "n", required = true, num_args = 1..)]
        n: Vec<u64>,
    },
    /// Recover coefficients numerically from samples of I(n).
    Fit {
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u64>>,
        #[arg(long)]
        max_order: Option<u32>,
    },
    /// Test the structural conjectures.
    Conjecture {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        which: u32,
        #[arg(long)]
        order: Option<u32>,
    },
    /// Check the alternating Zagier-type identity.
    Zagier {
        #[arg(short = 'n', long = "n", default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum)]
        method: Option<ZagierRoute>,
    },
}

/// What a run prints and returns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn error(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

/// Resolves configuration and dispatches one subcommand.
pub fn execute(
    cli: &Cli,
    env_precision: Option<&str>,
) -> Result<(Report, OutputFormat), CommandError> {
    let file = match &cli.config {
        Some(p) => Some(Overrides::from_file(p).map_err(|e| CommandError::Usage(e.to_string()))?),
        None => None,
    };
    let flags = Overrides {
        precision: cli.precision,
        order_cap: cli.order_cap,
        truncation: cli.truncation,
        format: cli.format,
        rules: cli.rules.clone(),
    };
    let cfg = RunConfig::resolve(env_precision, file.as_ref(), &flags)
        .map_err(|e| CommandError::Usage(e.to_string()))?;
    let report = match &cli.command {
        Command::Coeffs => commands::cmd_coeffs(&cfg),
        Command::VerifyLemmas { pmax, qmax, pmax4 } => {
            commands::cmd_verify_lemmas(&cfg, *pmax, *qmax, *pmax4)
        }
        Command::Expand { order, integrate } => commands::cmd_expand(&cfg, *order, *integrate),
        Command::EvalIn { n } => commands::cmd_eval_in(&cfg, n),
        Command::Fit { ns, max_order } => commands::cmd_fit(&cfg, ns.clone(), *max_order),
        Command::Conjecture { which, order } => commands::cmd_conjecture(&cfg, *which, *order),
        Command::Zagier { n, method } => commands::cmd_zagier(&cfg, *n, *method),
    }?;
    Ok((report, cfg.format))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, env_precision: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match execute(&cli, env_precision) {
        Ok((report, format)) => Outcome {
            code: if report.passed { 0 } else { 1 },
            stdout: report.render(format),
            stderr: String::new(),
        },
        Err(e) => Outcome::error(e.exit_code(), e),
    }
}

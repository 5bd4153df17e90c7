//! Command-line surface over the library: structural checks, game-value
//! series as CSV/JSON, exponent estimation, automata computations, family
//! generation and corpus sweeps.
//!
//! Exit codes: 0 success, 1 usage (including inputs that lack a required
//! property), 2 input parse failure, 3 cap overflow.

mod commands;
mod format;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Cap(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Cap(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl From<spf_core::Error> for CliError {
    fn from(e: spf_core::Error) -> Self {
        use spf_core::Error::*;
        match e {
            LayerCapExceeded { .. }
            | LetterCapExceeded { .. }
            | StateCapExceeded { .. }
            | ClosureCapExceeded { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "spf",
    about = "Game-value analysis of binary NZ-matrix sets: primitivity, exponents, \
             synchronization and reset thresholds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    K,
    Kbar,
    Keq,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    R1,
    R2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutomataOp {
    Rt,
    Eppstein,
    Diameter,
    Sync,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    CernyNz,
    Mn,
    Perturbed,
    Uniform,
    Example,
}

#[derive(Args)]
struct InputArg {
    /// Matrix-set file, or `-` for stdin.
    input: String,
}

#[derive(Subcommand)]
enum Command {
    /// Structural report: NZ, irreducibility, primitivity, exponent and a
    /// witness word.
    Check {
        #[command(flatten)]
        input: InputArg,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Game-value series as CSV (or JSON with --json).
    Spf {
        #[command(flatten)]
        input: InputArg,
        /// Horizon; when omitted the series runs until it reaches 1, the
        /// product set closes, or a safety cap is hit.
        #[arg(long = "t-max")]
        t_max: Option<usize>,
        #[arg(long, value_enum, default_value = "k")]
        mode: Mode,
        /// Disable dominance and column pruning.
        #[arg(long = "no-prune")]
        no_prune: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exponent estimate from the early series, with automata bounds.
    Approx {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum, default_value = "r1")]
        method: Method,
        /// Fitting horizon: `log`, `1.5log`, `2log`, or an explicit integer.
        #[arg(long, default_value = "log")]
        tprime: String,
        #[arg(long)]
        json: bool,
    },
    /// Reset-threshold and pair-graph computations on the associated DFA.
    Automata {
        #[command(flatten)]
        input: InputArg,
        #[arg(long, value_enum)]
        op: AutomataOp,
        /// Use the transpose set.
        #[arg(long)]
        transpose: bool,
        #[arg(long)]
        json: bool,
    },
    /// Generate a matrix set from a built-in family.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Example id (for --family example).
        #[arg(long)]
        id: Option<String>,
    },
    /// Sweep a seeded family and report per-set statistics and pass rates.
    Corpus {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value = "20")]
        count: usize,
        #[arg(long, default_value = "1")]
        seed: u64,
        #[arg(long, default_value = "5")]
        n: usize,
        #[arg(long, default_value = "2")]
        m: usize,
        /// Fitting horizon for the estimate columns.
        #[arg(long, default_value = "2log")]
        tprime: String,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version are not usage errors
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

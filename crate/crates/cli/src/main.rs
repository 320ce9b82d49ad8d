//! `shift-equiv`: decide and classify shift equivalence of integer matrices.
//!
//! Exit codes: 0 Equivalent (or success), 3 NotEquivalent, 4 Unknown,
//! 1 usage or parse error, 2 internal error.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] shift_equiv_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use shift_equiv_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(E::Internal(_)) => 2,
            CliError::Core(E::Unsupported(_)) => 4,
            CliError::Core(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Tsv,
}

/// Search bounds shared by every command that may fall back on witness
/// search.
#[derive(Clone, Copy, Debug)]
pub struct Config {
    pub entry_bound: u64,
    pub max_lag: u32,
    pub format: Format,
}

#[derive(Parser, Debug)]
#[command(name = "shift-equiv", version, about = "Shift equivalence of integer matrices")]
struct Cli {
    /// Largest |entry| tried by the bounded witness search.
    #[arg(long, global = true, env = "SHIFTEQ_ENTRY_BOUND", default_value_t = shift_equiv_core::decide::DEFAULT_ENTRY_BOUND)]
    entry_bound: u64,
    /// Largest lag tried by the bounded witness search.
    #[arg(long, global = true, env = "SHIFTEQ_MAX_LAG", default_value_t = shift_equiv_core::decide::DEFAULT_MAX_LAG)]
    max_lag: u32,
    /// Output format.
    #[arg(long, global = true, env = "SHIFTEQ_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether two matrices are shift equivalent over ℤ.
    Decide {
        /// Matrices as JSON, e.g. "[[1,0],[0,-1]]".
        matrices: Vec<String>,
        /// JSON file with one or more matrices (repeatable).
        #[arg(long)]
        file: Vec<PathBuf>,
    },
    /// List the shift equivalence classes with a given characteristic polynomial.
    Classify {
        /// Monic polynomial in t, e.g. "t^2+15".
        polynomial: String,
    },
    /// Tabulate the R, J0, J1 isomorphism tests for ℤ[√(4c+1)].
    ScanCjj {
        #[arg(long, default_value_t = -100, allow_hyphen_values = true)]
        c_min: i64,
        #[arg(long, default_value_t = 100, allow_hyphen_values = true)]
        c_max: i64,
    },
    /// Bounded search for an explicit witness (R, S, m).
    Witness {
        matrices: Vec<String>,
        #[arg(long)]
        file: Vec<PathBuf>,
    },
    /// The Picard group of ℤ[t]/(χ) for an irreducible quadratic χ.
    Picard { polynomial: String },
    /// Solve a·x² + b·x·y + c·y² = n over ℤ.
    #[command(allow_negative_numbers = true)]
    SolveForm { a: String, b: String, c: String, n: String },
    /// Cokernels of f(T); defaults to the Bowen–Franks group, f = 1 − t.
    BowenFranks {
        matrix: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Polynomial f (repeatable).
        #[arg(long = "poly", default_values_t = vec!["1-t".to_string()])]
        polys: Vec<String>,
    },
    /// Actions on (ℤ/pⁿ)²: decide two matrices, or list the classes of
    /// [[λ1, 0], [a, λ2]] when no matrices are given.
    #[command(allow_negative_numbers = true)]
    Finite {
        matrices: Vec<String>,
        #[arg(long)]
        file: Vec<PathBuf>,
        #[arg(long)]
        p: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        lambda1: Option<String>,
        #[arg(long)]
        lambda2: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let cfg = Config {
        entry_bound: cli.entry_bound,
        max_lag: cli.max_lag,
        format: cli.format,
    };
    let result = match cli.command {
        Command::Decide { matrices, file } => commands::decide(&cfg, &matrices, &file),
        Command::Classify { polynomial } => commands::classify(&cfg, &polynomial),
        Command::ScanCjj { c_min, c_max } => commands::scan_cjj(&cfg, c_min, c_max),
        Command::Witness { matrices, file } => commands::witness(&cfg, &matrices, &file),
        Command::Picard { polynomial } => commands::picard(&cfg, &polynomial),
        Command::SolveForm { a, b, c, n } => commands::solve_form(&cfg, [&a, &b, &c, &n]),
        Command::BowenFranks { matrix, file, polys } => commands::bowen_franks(&cfg, matrix.as_deref(), file.as_deref(), &polys),
        Command::Finite { matrices, file, p, n, lambda1, lambda2 } => {
            commands::finite(&cfg, &matrices, &file, &p, n, lambda1.as_deref(), lambda2.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

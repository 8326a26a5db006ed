//! Command-line front end for `qfhm`.
//!
//! Exit codes: 0 success (or `equivalent`), 1 `inequivalent` or failed
//! checks, 2 errors, 3 `inconclusive`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod input;
pub mod output;

use input::InputError;

#[derive(Debug, Parser)]
#[command(
    name = "qfhm",
    version,
    about = "Invariants of finite-rank Hilbert modules given by reproducing kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curvature form c_ij of a kernel on a grid.
    Curvature(CurvatureArgs),
    /// Eigenvalues of the modulus of the canonical map between two kernels.
    Modulus(ModulusArgs),
    /// Decide unitary equivalence of two kernels.
    Equiv(EquivArgs),
    /// Pointwise rank and smallest singular value of a multiplier.
    RankProfile(RankProfileArgs),
    /// Run the built-in invariant and oracle checks.
    Check(CheckArgs),
}

/// `ROWSxCOLS` cells per complex variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid '{}' is not of the form ROWSxCOLS", s))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("grid '{}' is not of the form ROWSxCOLS", s))
        };
        let g = GridSize {
            rows: parse(r)?,
            cols: parse(c)?,
        };
        if g.rows < 3 || g.cols < 3 {
            return Err(format!("grid {} is too small: both dimensions must be at least 3", g));
        }
        Ok(g)
    }
}

impl fmt::Display for GridSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

fn positive_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("'{}' is not a number", s))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance {} must be positive", s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    /// Finite-difference step h.
    #[arg(long, default_value_t = qfhm::curvature::DEFAULT_STEP)]
    pub step: f64,
    /// Use the plain central difference instead of Richardson extrapolation.
    #[arg(long)]
    pub no_richardson: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridOut {
    #[arg(long, default_value = "41x41")]
    pub grid: GridSize,
    /// Output file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub kernel: PathBuf,
    #[command(flatten)]
    pub io: GridOut,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ModulusArgs {
    #[arg(long)]
    pub kernel_a: PathBuf,
    #[arg(long)]
    pub kernel_b: PathBuf,
    #[command(flatten)]
    pub io: GridOut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EquivTest {
    /// Vanishing of the complex Hessian of log μ² (rank one).
    Curvature,
    /// Equality of the Grammians; never concludes inequivalence.
    Grammian,
    /// Check Ψ*Ψ = μ² for a candidate Ψ given with --psi.
    Factorization,
}

#[derive(Debug, Clone, Args)]
pub struct EquivArgs {
    #[arg(long)]
    pub kernel_a: PathBuf,
    #[arg(long)]
    pub kernel_b: PathBuf,
    #[arg(long, default_value = "25x25")]
    pub grid: GridSize,
    #[arg(long, default_value = "1e-5", value_parser = positive_tol)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = EquivTest::Curvature)]
    pub test: EquivTest,
    /// Candidate multiplier for `--test factorization`.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Verdict JSON; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RankProfileArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = qfhm::mapanalysis::DEFAULT_RANK_TOL, value_parser = positive_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub io: GridOut,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Only the sampled-model checks.
    #[arg(long)]
    pub oracle: bool,
    /// JSON report file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: InputError },
    #[error(transparent)]
    Core(#[from] qfhm::Error),
    #[error("{0}")]
    Usage(String),
}

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Inequivalent,
    Inconclusive,
    ChecksFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Inequivalent | Outcome::ChecksFailed => 1,
            Outcome::Inconclusive => 3,
        }
    }
}

/// Exit code used for every error.
pub const ERROR_EXIT: i32 = 2;

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Curvature(a) => commands::curvature(a),
        Command::Modulus(a) => commands::modulus(a),
        Command::Equiv(a) => commands::equiv(a),
        Command::RankProfile(a) => commands::rank_profile(a),
        Command::Check(a) => commands::check(a),
    }
}

use std::path::PathBuf;

use blocksym::oracle::ProblemKind;
use blocksym::solvers::{NormReference, SolverKind};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "blocksym",
    version,
    about = "Block COCG/COCR solvers for complex symmetric systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run solvers on one problem and print a report.
    Solve(SolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Diagdominant,
    Realspd,
    Diagonal,
}

impl GenKind {
    pub fn problem_kind(self) -> ProblemKind {
        match self {
            GenKind::Diagdominant => ProblemKind::DiagDominantComplexSymmetric,
            GenKind::Realspd => ProblemKind::RealSpd,
            GenKind::Diagonal => ProblemKind::DiagonalComplex,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Diagdominant => "diagdominant",
            GenKind::Realspd => "realspd",
            GenKind::Diagonal => "diagonal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitialGuess {
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormRef {
    Rhs,
    R0,
}

impl From<NormRef> for NormReference {
    fn from(r: NormRef) -> Self {
        match r {
            NormRef::Rhs => NormReference::Rhs,
            NormRef::R0 => NormReference::InitialResidual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Md,
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolveArgs {
    /// Matrix Market file holding the operator.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub matrix: Option<PathBuf>,
    /// Generate a seeded problem instead of reading one.
    #[arg(long, value_enum)]
    pub gen: Option<GenKind>,
    /// Order of the generated matrix.
    #[arg(long, requires = "gen")]
    pub n: Option<usize>,
    /// Off-diagonal density of the generated matrix.
    #[arg(long, default_value_t = 1.0)]
    pub density: f64,
    /// Number of right-hand sides.
    #[arg(long)]
    pub p: usize,
    /// Right-hand side block in Matrix Market array format (default: seeded uniform).
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "bl_cocg,bl_cocg_rq,bl_cocr,bl_cocr_rq"
    )]
    pub solvers: Vec<SolverKind>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration cap (default: matrix order).
    #[arg(long)]
    pub maxit: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = InitialGuess::Zero)]
    pub x0: InitialGuess,
    #[arg(long = "norm-ref", value_enum, default_value_t = NormRef::Rhs)]
    pub norm_ref: NormRef,
    /// Report destination, a path or `stdout`.
    #[arg(long, default_value = "stdout")]
    pub out: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write one `iter,relres` CSV per solver into this directory.
    #[arg(long)]
    pub history_dir: Option<PathBuf>,
    /// Run the solvers concurrently (timings are then marked unreliable).
    #[arg(long)]
    pub parallel: bool,
}

impl SolveArgs {
    /// Arguments for a generated problem with defaults everywhere else.
    pub fn generated(kind: GenKind, n: usize, p: usize, seed: u64) -> Self {
        Self {
            matrix: None,
            gen: Some(kind),
            n: Some(n),
            density: 1.0,
            p,
            rhs: None,
            solvers: SolverKind::ALL.to_vec(),
            tol: 1e-10,
            maxit: None,
            seed,
            x0: InitialGuess::Zero,
            norm_ref: NormRef::Rhs,
            out: "stdout".into(),
            format: OutputFormat::Csv,
            history_dir: None,
            parallel: false,
        }
    }

    /// Arguments for a Matrix Market file with defaults everywhere else.
    pub fn from_file(path: impl Into<PathBuf>, p: usize, seed: u64) -> Self {
        Self {
            matrix: Some(path.into()),
            gen: None,
            n: None,
            ..Self::generated(GenKind::Diagdominant, 1, p, seed)
        }
    }
}

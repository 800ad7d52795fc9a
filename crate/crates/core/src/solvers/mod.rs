//! Block COCG / COCR solvers and their residual-orthonormalized variants.
//!
//! All four methods share the driver in this module: it validates inputs,
//! monitors `||R_m||_F / ref` (or `||xi_m||_F / ref` for the RQ variants),
//! enforces the iteration cap, detects Gram breakdown and non-finite iterates,
//! and recomputes the true residual once at exit. The recurrences themselves
//! live in [`cocg`] and [`cocr`].
//!
//! Every method applies the operator exactly once per iteration. Setup costs
//! one application for `R_0 = B - A X_0` (two for the COCR variants, which
//! also need `A R_0` or `A Q_0`), and one more is spent on the true residual
//! after the loop.

mod cocg;
mod cocr;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::la::{
    BlockVector, LaError, LinearOperator, SmallMatrix, SymMatrix, DEFAULT_PIVOT_FLOOR,
};

pub use cocg::{CocgRqState, CocgState};
pub use cocr::{CocrRqState, CocrState};

/// Diagonal entries of `xi` below this fraction of the largest one raise a
/// rank-loss warning.
pub const RANK_LOSS_RATIO: f64 = 1e-12;

/// Denominator of the relative residual used for stopping and history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormReference {
    /// `||B||_F`
    #[default]
    Rhs,
    /// `||R_0||_F`
    InitialResidual,
}

impl NormReference {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormReference::Rhs => "rhs",
            NormReference::InitialResidual => "r0",
        }
    }
}

/// Right-hand side of the `alpha'` system in block COCR-RQ.
///
/// Both forms agree in exact arithmetic because `(A S_{m-1})^T Q_m = 0`.
/// Near block-rank loss the `U` form amplifies the noise carried by the
/// degenerate columns of `Q_m` and the iteration can diverge, so `Q^T V` is
/// the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CocrRqAlphaRhs {
    /// `Q_m^T V_m` with `V_m = A Q_m`.
    #[default]
    QtV,
    /// `Q_m^T U_m` with `U_m = A S_m`.
    QtU,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    /// Iteration cap; `None` means the matrix order `n`.
    pub max_iter: Option<usize>,
    pub norm_reference: NormReference,
    pub record_history: bool,
    /// Relative pivot threshold for the small Gram solves.
    pub breakdown_pivot_floor: f64,
    pub cocr_rq_alpha_rhs: CocrRqAlphaRhs,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: None,
            norm_reference: NormReference::Rhs,
            record_history: true,
            breakdown_pivot_floor: DEFAULT_PIVOT_FLOOR,
            cocr_rq_alpha_rhs: CocrRqAlphaRhs::default(),
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_norm_reference(mut self, r: NormReference) -> Self {
        self.norm_reference = r;
        self
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(SolveError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(SolveError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        if self.breakdown_pivot_floor.is_nan() || self.breakdown_pivot_floor < 0.0 {
            return Err(SolveError::InvalidConfig(
                "breakdown_pivot_floor must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Cocg,
    Cocr,
    CocgRq,
    CocrRq,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Cocg,
        SolverKind::CocgRq,
        SolverKind::Cocr,
        SolverKind::CocrRq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Cocg => "bl_cocg",
            SolverKind::Cocr => "bl_cocr",
            SolverKind::CocgRq => "bl_cocg_rq",
            SolverKind::CocrRq => "bl_cocr_rq",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = SolveError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SolveError::UnknownSolver(s.to_string()))
    }
}

/// Which small system failed to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramSystem {
    /// The system for `alpha_m` (or `alpha'_m`).
    Alpha,
    /// The system for `beta_m` (or `beta'_m`).
    Beta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Breakdown {
    pub system: GramSystem,
    pub iteration: usize,
    pub pivot_index: usize,
    pub pivot_magnitude: f64,
}

/// `xi_m` has a diagonal entry far below its largest one: some residual
/// columns have (nearly) converged or become dependent. The run continues.
#[derive(Debug, Clone, PartialEq)]
pub struct RankLossWarning {
    pub iteration: usize,
    pub min_diag: f64,
    pub max_diag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    Breakdown,
    /// NaN or Inf appeared in an iterate.
    Diverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "failed: max_iter",
            Status::Breakdown => "failed: breakdown",
            Status::Diverged => "failed: diverged",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Status::Converged,
            Status::MaxIter,
            Status::Breakdown,
            Status::Diverged,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
        .ok_or_else(|| format!("unknown status {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solver: SolverKind,
    pub x: BlockVector,
    /// Index `m` of the last iterate.
    pub iterations: usize,
    pub status: Status,
    /// `log10(||B - A X||_F / ||B||_F)` from a fresh product.
    pub trr: f64,
    /// Last monitored relative residual.
    pub final_relres: f64,
    /// `history[m]` is the monitored relative residual of iterate `m`
    /// (empty unless `record_history`).
    pub history: Vec<f64>,
    pub breakdown: Option<Breakdown>,
    pub warnings: Vec<RankLossWarning>,
    /// Wall seconds spent in the iteration, true residual excluded.
    pub elapsed: f64,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("operator is not complex symmetric (check_complex_symmetric failed)")]
    NotComplexSymmetric,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("right-hand side is zero, relative residual undefined")]
    ZeroRhs,
    #[error("non-finite entries in {0}")]
    NonFiniteInput(&'static str),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown solver {0:?} (expected bl_cocg, bl_cocr, bl_cocg_rq or bl_cocr_rq)")]
    UnknownSolver(String),
    #[error(transparent)]
    La(#[from] LaError),
}

/// Block residual as held by a method: explicit, or as `Q xi`.
#[derive(Debug, Clone, Copy)]
pub enum ResidualView<'a> {
    Plain(&'a BlockVector),
    Factored {
        q: &'a BlockVector,
        xi: &'a SmallMatrix,
    },
}

impl ResidualView<'_> {
    pub fn to_block(&self) -> BlockVector {
        match self {
            ResidualView::Plain(r) => (*r).clone(),
            ResidualView::Factored { q, xi } => {
                q.mul_small(xi).expect("conformable by construction")
            }
        }
    }
}

/// Read-only view of the iteration state at the top of iteration `m`.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub iteration: usize,
    pub x: &'a BlockVector,
    pub residual: ResidualView<'a>,
    /// `P_m`, or `S_m` for the RQ variants.
    pub direction: &'a BlockVector,
    /// `U_m = A P_m` (or `A S_m`) where the method carries it.
    pub a_direction: Option<&'a BlockVector>,
}

pub(crate) enum StepError {
    Breakdown {
        system: GramSystem,
        pivot_index: usize,
        pivot_magnitude: f64,
    },
    La(LaError),
}

impl From<LaError> for StepError {
    fn from(e: LaError) -> Self {
        StepError::La(e)
    }
}

pub(crate) fn gram_solve(
    m: &SmallMatrix,
    rhs: &SmallMatrix,
    floor: f64,
    system: GramSystem,
) -> Result<SmallMatrix, StepError> {
    m.solve(rhs, floor).map_err(|e| match e {
        LaError::Singular {
            pivot_index,
            magnitude,
        } => StepError::Breakdown {
            system,
            pivot_index,
            pivot_magnitude: magnitude,
        },
        other => StepError::La(other),
    })
}

/// One block Krylov recurrence, advanced by the shared driver.
pub(crate) trait Method: Sized {
    fn init<O: LinearOperator>(op: &O, b: &BlockVector, x0: &BlockVector) -> Result<Self, LaError>;
    /// `||R_m||_F`, or `||xi_m||_F`.
    fn residual_norm(&self) -> f64;
    /// Moves from iterate `m` to `m + 1`. On a beta breakdown the solution
    /// and residual have already been advanced.
    fn step<O: LinearOperator>(&mut self, op: &O, cfg: &SolverConfig) -> Result<(), StepError>;
    fn snapshot(&self, iteration: usize) -> Snapshot<'_>;
    fn into_x(self) -> BlockVector;
    fn is_finite(&self) -> bool;
    /// Diagonal range of `xi_m` for methods that carry one.
    fn xi_diag_range(&self) -> Option<(f64, f64)> {
        None
    }
}

fn check_inputs<O: LinearOperator>(
    op: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<f64, SolveError> {
    cfg.validate()?;
    if op.dim() != b.n() {
        return Err(SolveError::DimensionMismatch(format!(
            "operator order {} vs right-hand side rows {}",
            op.dim(),
            b.n()
        )));
    }
    if x0.n() != b.n() || x0.p() != b.p() {
        return Err(SolveError::DimensionMismatch(format!(
            "initial guess {}x{} vs right-hand side {}x{}",
            x0.n(),
            x0.p(),
            b.n(),
            b.p()
        )));
    }
    if !b.is_finite() {
        return Err(SolveError::NonFiniteInput("right-hand side"));
    }
    if !x0.is_finite() {
        return Err(SolveError::NonFiniteInput("initial guess"));
    }
    if !op.is_complex_symmetric() {
        return Err(SolveError::NotComplexSymmetric);
    }
    let b_norm = b.fro_norm();
    if b_norm == 0.0 {
        return Err(SolveError::ZeroRhs);
    }
    Ok(b_norm)
}

fn drive<M: Method, O: LinearOperator>(
    kind: SolverKind,
    op: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&Snapshot<'_>),
) -> Result<SolveResult, SolveError> {
    let b_norm = check_inputs(op, b, x0, cfg)?;
    let start = Instant::now();
    let mut state = M::init(op, b, x0)?;
    let reference = match cfg.norm_reference {
        NormReference::Rhs => b_norm,
        NormReference::InitialResidual => state.residual_norm(),
    };
    let relative = |res: f64| {
        if reference == 0.0 {
            0.0
        } else {
            res / reference
        }
    };
    let max_iter = cfg.max_iter.unwrap_or(op.dim());

    let mut history = Vec::new();
    let mut warnings = Vec::new();
    let mut breakdown = None;
    let mut final_relres = f64::NAN;
    let mut m = 0;

    let status = loop {
        let rel = relative(state.residual_norm());
        if !rel.is_finite() || !state.is_finite() {
            break Status::Diverged;
        }
        final_relres = rel;
        if cfg.record_history {
            history.push(rel);
        }
        if let Some((lo, hi)) = state.xi_diag_range() {
            if lo < RANK_LOSS_RATIO * hi {
                warnings.push(RankLossWarning {
                    iteration: m,
                    min_diag: lo,
                    max_diag: hi,
                });
            }
        }
        observer(&state.snapshot(m));
        if rel <= cfg.tol {
            break Status::Converged;
        }
        if m >= max_iter {
            break Status::MaxIter;
        }
        match state.step(op, cfg) {
            Ok(()) => m += 1,
            Err(StepError::La(e)) => return Err(e.into()),
            Err(StepError::Breakdown {
                system,
                pivot_index,
                pivot_magnitude,
            }) => {
                breakdown = Some(Breakdown {
                    system,
                    iteration: m,
                    pivot_index,
                    pivot_magnitude,
                });
                if system == GramSystem::Alpha {
                    break Status::Breakdown;
                }
                // X and R already advanced: the new iterate may have converged.
                m += 1;
                let rel = relative(state.residual_norm());
                if !rel.is_finite() || !state.is_finite() {
                    break Status::Diverged;
                }
                final_relres = rel;
                if cfg.record_history {
                    history.push(rel);
                }
                break if rel <= cfg.tol {
                    Status::Converged
                } else {
                    Status::Breakdown
                };
            }
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    let x = state.into_x();
    let trr = if x.is_finite() {
        true_relative_residual(op, b, &x)?
    } else {
        f64::NAN
    };
    Ok(SolveResult {
        solver: kind,
        x,
        iterations: m,
        status,
        trr,
        final_relres,
        history,
        breakdown,
        warnings,
        elapsed,
    })
}

/// Runs `kind`, calling `observer` at the top of every iteration.
pub fn solve_observed<O: LinearOperator>(
    kind: SolverKind,
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
    observer: &mut dyn FnMut(&Snapshot<'_>),
) -> Result<SolveResult, SolveError> {
    match kind {
        SolverKind::Cocg => drive::<CocgState, O>(kind, a, b, x0, cfg, observer),
        SolverKind::Cocr => drive::<CocrState, O>(kind, a, b, x0, cfg, observer),
        SolverKind::CocgRq => drive::<CocgRqState, O>(kind, a, b, x0, cfg, observer),
        SolverKind::CocrRq => drive::<CocrRqState, O>(kind, a, b, x0, cfg, observer),
    }
}

pub fn solve<O: LinearOperator>(
    kind: SolverKind,
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    solve_observed(kind, a, b, x0, cfg, &mut |_| {})
}

/// Block COCG: Galerkin coefficients `(P^T A P) alpha = R^T R`,
/// `(R_m^T R_m) beta = R_{m+1}^T R_{m+1}`.
pub fn bl_cocg<O: LinearOperator>(
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    solve(SolverKind::Cocg, a, b, x0, cfg)
}

/// Block COCR, with `A P_{m+1}` carried by recurrence.
pub fn bl_cocr<O: LinearOperator>(
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    solve(SolverKind::Cocr, a, b, x0, cfg)
}

/// Block COCG with the residual kept as `Q_m xi_m`.
pub fn bl_cocg_rq<O: LinearOperator>(
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    solve(SolverKind::CocgRq, a, b, x0, cfg)
}

/// Block COCR with the residual kept as `Q_m xi_m`.
pub fn bl_cocr_rq<O: LinearOperator>(
    a: &O,
    b: &BlockVector,
    x0: &BlockVector,
    cfg: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    solve(SolverKind::CocrRq, a, b, x0, cfg)
}

/// `log10(||B - A X||_F / ||B||_F)`, from a fresh operator application.
pub fn true_relative_residual<O: LinearOperator>(
    a: &O,
    b: &BlockVector,
    x: &BlockVector,
) -> Result<f64, SolveError> {
    let b_norm = b.fro_norm();
    if b_norm == 0.0 {
        return Err(SolveError::ZeroRhs);
    }
    let r = b.sub(&a.apply(x)?)?;
    Ok((r.fro_norm() / b_norm).log10())
}

pub fn check_complex_symmetric(a: &SymMatrix) -> bool {
    a.check_complex_symmetric()
}

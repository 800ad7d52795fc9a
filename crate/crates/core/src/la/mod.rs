//! Complex linear-algebra kernels shared by the block solvers.
//!
//! Block vectors (`n x p`, one column per right-hand side) are stored
//! column-major, operators are row-major CSR or dense. All reductions run in
//! a fixed sequential order so that repeated runs are bitwise identical.

mod block;
mod matrix;
mod qr;
mod small;

pub use block::{axpy_block, t_gram, BlockVector};
pub use matrix::{block_matvec, LinearOperator, Storage, SymMatrix, Symmetry};
pub use qr::{thin_qr, QrFactors};
pub use small::{solve_small, SmallMatrix, DEFAULT_PIVOT_FLOOR};

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the linear-algebra kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LaError {
    #[error("{op}: dimension mismatch, expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("thin QR needs at least as many rows as columns (n = {n}, p = {p})")]
    TooFewRows { n: usize, p: usize },
    #[error("singular system: pivot {pivot_index} has magnitude {magnitude:e}")]
    Singular { pivot_index: usize, magnitude: f64 },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("entry ({row}, {col}) out of bounds for order {n}")]
    OutOfBounds { row: usize, col: usize, n: usize },
}

pub(crate) fn mismatch(op: &'static str, expected: impl ToString, found: impl ToString) -> LaError {
    LaError::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Frobenius norm: square root of the sum of squared moduli, accumulated in
/// storage order.
pub fn fro_norm<M: AsRef<[Complex64]> + ?Sized>(m: &M) -> f64 {
    m.as_ref()
        .iter()
        .fold(0.0, |acc, z| acc + (z.re * z.re + z.im * z.im))
        .sqrt()
}

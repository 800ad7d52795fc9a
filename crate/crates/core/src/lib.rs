//! Block Krylov solvers for complex symmetric linear systems `A X = B` with
//! several right-hand sides, where `A = A^T` but `A != A^H`.
//!
//! Four methods are provided, all built on the same recurrences
//! `R_{m+1} = R_m - A P_m alpha_m`, `P_{m+1} = R_{m+1} + P_m beta_m`:
//!
//! - [`solvers::bl_cocg`]: block conjugate orthogonal CG,
//! - [`solvers::bl_cocr`]: block conjugate A-orthogonal conjugate residual,
//! - [`solvers::bl_cocg_rq`] / [`solvers::bl_cocr_rq`]: the same methods with the
//!   block residual kept in orthonormalized form `R_m = Q_m xi_m`.
//!
//! The [`la`] module holds the dense/sparse kernels, [`mm`] reads and writes
//! Matrix Market files and [`oracle`] provides seeded test problems and an
//! independent dense direct solver.

pub mod la;
pub mod mm;
pub mod oracle;
pub mod solvers;

pub use la::{BlockVector, LinearOperator, QrFactors, SmallMatrix, SymMatrix};
pub use num_complex::Complex64;
pub use solvers::{SolveError, SolveResult, SolverConfig, SolverKind, Status};

//! Seeded test problems and an independent dense direct solver.
//!
//! # Random stream
//!
//! Every generator draws from xoshiro256** whose 256-bit state is filled by
//! SplitMix64 from the 64-bit seed (`Xoshiro256StarStar::seed_from_u64`).
//! A uniform double in `[0, 1)` is `(next_u64() >> 11) * 2^-53`. For seed 0
//! the first outputs are `0x99ec5f36cb75f2b4, 0xbf6e1f784956452a, ...`.
//!
//! Draw order, which fixes every generated problem bit for bit:
//!
//! 1. Off-diagonal lower triangle, rows `i = 0..n`, columns `j = 0..i`: one
//!    draw `u`; if `u < density` the entry is present and takes a real part
//!    `2u' - 1` and (complex kinds only) an imaginary part `2u'' - 1`. The
//!    entry is mirrored to `(j, i)`.
//! 2. Diagonal: [`ProblemKind::DiagDominantComplexSymmetric`] sets
//!    `(2 + sum_j |a_ij|) + i`, [`ProblemKind::RealSpd`] sets `1 + sum_j |a_ij|`.
//!    [`ProblemKind::DiagonalComplex`] skips step 1 and draws `1 + u` and
//!    `2u' - 1` per diagonal entry.
//! 3. Right-hand side, column-major: real part `u`, imaginary part `u'` only
//!    when `complex_rhs` is set.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use thiserror::Error;

use crate::la::{BlockVector, SymMatrix, Symmetry};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid problem spec: {0}")]
    InvalidSpec(String),
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("dimension mismatch: matrix order {n}, right-hand side has {rows} rows")]
    DimensionMismatch { n: usize, rows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    DiagDominantComplexSymmetric,
    RealSpd,
    DiagonalComplex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub n: usize,
    pub p: usize,
    pub kind: ProblemKind,
    /// Fraction of off-diagonal lower-triangle entries present (default 1).
    pub density: f64,
    pub seed: u64,
    /// Draw complex instead of real right-hand sides.
    pub complex_rhs: bool,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, n: usize, p: usize, seed: u64) -> Self {
        Self {
            n,
            p,
            kind,
            density: 1.0,
            seed,
            complex_rhs: false,
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_complex_rhs(mut self) -> Self {
        self.complex_rhs = true;
        self
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(OracleError::InvalidSpec(format!(
                "density {} not in (0, 1]",
                self.density
            )));
        }
        if self.p == 0 || self.p > self.n {
            return Err(OracleError::InvalidSpec(format!(
                "need n >= p >= 1, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        Ok(())
    }
}

/// Pinned uniform stream used by the generators.
pub struct UniformStream(Xoshiro256StarStar);

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[-1, 1)`.
    pub fn signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}

/// Builds the matrix and right-hand side described by `spec`. Pure in `spec`.
pub fn gen_problem(spec: &ProblemSpec) -> Result<(SymMatrix, BlockVector), OracleError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = UniformStream::new(spec.seed);
    let mut triplets = Vec::new();

    match spec.kind {
        ProblemKind::DiagonalComplex => {
            for i in 0..n {
                let re = 1.0 + rng.next_f64();
                let im = rng.signed();
                triplets.push((i, i, Complex64::new(re, im)));
            }
        }
        ProblemKind::DiagDominantComplexSymmetric | ProblemKind::RealSpd => {
            let complex = spec.kind == ProblemKind::DiagDominantComplexSymmetric;
            let mut row_abs = vec![0.0; n];
            for i in 0..n {
                for j in 0..i {
                    if rng.next_f64() < spec.density {
                        let re = rng.signed();
                        let im = if complex { rng.signed() } else { 0.0 };
                        let v = Complex64::new(re, im);
                        triplets.push((i, j, v));
                        triplets.push((j, i, v));
                        row_abs[i] += v.norm();
                        row_abs[j] += v.norm();
                    }
                }
            }
            for (i, s) in row_abs.iter().enumerate() {
                let d = if complex {
                    Complex64::new(2.0 + s, 1.0)
                } else {
                    Complex64::new(1.0 + s, 0.0)
                };
                triplets.push((i, i, d));
            }
        }
    }
    let a = SymMatrix::from_triplets(n, triplets, Symmetry::ComplexSymmetric)
        .map_err(|e| OracleError::InvalidSpec(e.to_string()))?;

    let b = fill_rhs(&mut rng, BlockVector::zeros(n, spec.p), spec.complex_rhs);
    Ok((a, b))
}

/// Right-hand side alone, drawn from a fresh stream: `n x p` with real
/// parts uniform in `[0, 1)` (and imaginary parts too when `complex`).
/// Used when the matrix comes from a file.
pub fn gen_rhs(n: usize, p: usize, seed: u64, complex: bool) -> BlockVector {
    let mut rng = UniformStream::new(seed);
    fill_rhs(&mut rng, BlockVector::zeros(n, p), complex)
}

fn fill_rhs(rng: &mut UniformStream, mut b: BlockVector, complex: bool) -> BlockVector {
    for z in b.as_mut_slice() {
        let re = rng.next_f64();
        let im = if complex { rng.next_f64() } else { 0.0 };
        *z = Complex64::new(re, im);
    }
    b
}

/// Solves `A X = B` densely by partially pivoted LU (nalgebra). Symmetry is
/// not used, so this stays independent of the Krylov code paths.
pub fn direct_solve(a: &SymMatrix, b: &BlockVector) -> Result<BlockVector, OracleError> {
    let n = a.n();
    if b.n() != n {
        return Err(OracleError::DimensionMismatch { n, rows: b.n() });
    }
    let dense = DMatrix::from_row_slice(n, n, &a.to_dense_row_major());
    let lu = dense.lu();
    let u_diag: Vec<f64> = (0..n).map(|i| lu.u()[(i, i)].norm()).collect();
    let max = u_diag.iter().cloned().fold(0.0, f64::max);
    let min = u_diag.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= (n as f64) * f64::EPSILON * max {
        return Err(OracleError::Singular);
    }
    let rhs = DMatrix::from_column_slice(n, b.p(), b.as_slice());
    let x = lu.solve(&rhs).ok_or(OracleError::Singular)?;
    Ok(BlockVector::from_col_major(n, b.p(), x.as_slice().to_vec()).expect("shape preserved"))
}

/// Single right-hand side COCG on a dense copy of `A`, written without any of
/// the block kernels. Returns `||r_m|| / ||b||` for `m = 0, 1, ...` until the
/// ratio drops to `tol` or `max_iter` steps are taken.
pub fn scalar_cocg_history(a: &SymMatrix, b: &[Complex64], tol: f64, max_iter: usize) -> Vec<f64> {
    let dense = a.to_dense_row_major();
    let b_norm = norm(b);
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rho = dot(&r, &r);
    let mut hist = vec![norm(&r) / b_norm];
    for _ in 0..max_iter {
        if *hist.last().unwrap() <= tol {
            break;
        }
        let q = dense_mv(&dense, &p);
        let alpha = rho / dot(&p, &q);
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        let rho_next = dot(&r, &r);
        let beta = rho_next / rho;
        rho = rho_next;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        hist.push(norm(&r) / b_norm);
    }
    hist
}

/// Single right-hand side COCR, same conventions as [`scalar_cocg_history`].
pub fn scalar_cocr_history(a: &SymMatrix, b: &[Complex64], tol: f64, max_iter: usize) -> Vec<f64> {
    let dense = a.to_dense_row_major();
    let b_norm = norm(b);
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ar = dense_mv(&dense, &r);
    let mut ap = ar.clone();
    let mut rar = dot(&r, &ar);
    let mut hist = vec![norm(&r) / b_norm];
    for _ in 0..max_iter {
        if *hist.last().unwrap() <= tol {
            break;
        }
        let alpha = rar / dot(&ap, &ap);
        for (ri, qi) in r.iter_mut().zip(&ap) {
            *ri -= alpha * qi;
        }
        ar = dense_mv(&dense, &r);
        let rar_next = dot(&r, &ar);
        let beta = rar_next / rar;
        rar = rar_next;
        for k in 0..r.len() {
            p[k] = r[k] + beta * p[k];
            ap[k] = ar[k] + beta * ap[k];
        }
        hist.push(norm(&r) / b_norm);
    }
    hist
}

/// Unconjugated `x^T y`.
fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dense_mv(a: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], x)).collect()
}

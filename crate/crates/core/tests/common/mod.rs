#![allow(dead_code)]

use std::cell::Cell;

use blocksym::la::{block_matvec, LaError};
use blocksym::oracle::{gen_problem, ProblemKind, ProblemSpec, UniformStream};
use blocksym::{BlockVector, Complex64, LinearOperator, SmallMatrix, SymMatrix};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn diag_dominant(n: usize, p: usize, seed: u64) -> (SymMatrix, BlockVector) {
    gen_problem(&ProblemSpec::new(
        ProblemKind::DiagDominantComplexSymmetric,
        n,
        p,
        seed,
    ))
    .unwrap()
}

pub fn sparse_diag_dominant(
    n: usize,
    p: usize,
    seed: u64,
    density: f64,
) -> (SymMatrix, BlockVector) {
    gen_problem(
        &ProblemSpec::new(ProblemKind::DiagDominantComplexSymmetric, n, p, seed)
            .with_density(density),
    )
    .unwrap()
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_block(n: usize, p: usize, seed: u64) -> BlockVector {
    let mut s = UniformStream::new(seed);
    BlockVector::from_fn(n, p, |_, _| {
        let re = s.signed();
        c(re, s.signed())
    })
}

pub fn random_small(p: usize, seed: u64) -> SmallMatrix {
    let mut s = UniformStream::new(seed);
    SmallMatrix::from_fn(p, |_, _| {
        let re = s.signed();
        c(re, s.signed())
    })
}

pub fn rel_diff(x: &BlockVector, y: &BlockVector) -> f64 {
    x.sub(y).unwrap().fro_norm() / y.fro_norm()
}

/// Forwards to the wrapped matrix and counts block products.
pub struct Counting<'a> {
    pub inner: &'a SymMatrix,
    pub calls: Cell<usize>,
}

impl<'a> Counting<'a> {
    pub fn new(inner: &'a SymMatrix) -> Self {
        Self {
            inner,
            calls: Cell::new(0),
        }
    }
}

impl LinearOperator for Counting<'_> {
    fn dim(&self) -> usize {
        self.inner.n()
    }
    fn apply(&self, v: &BlockVector) -> Result<BlockVector, LaError> {
        self.calls.set(self.calls.get() + 1);
        block_matvec(self.inner, v)
    }
    fn is_complex_symmetric(&self) -> bool {
        self.inner.check_complex_symmetric()
    }
}

use num_complex::Complex64;

use super::{mismatch, BlockVector, LaError};

/// Structural symmetry declared by the source of a matrix.
///
/// Only [`Symmetry::ComplexSymmetric`] operators are accepted by the solvers;
/// other tags are kept so a parsed file can be inspected and rejected cleanly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    ComplexSymmetric,
    General,
    Hermitian,
    SkewSymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    Csr {
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<Complex64>,
    },
    /// Row-major `n x n` values.
    Dense(Vec<Complex64>),
}

/// Square complex operator, sparse (CSR) or dense.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    storage: Storage,
    symmetry: Symmetry,
}

/// Anything that can be applied to a block of vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &BlockVector) -> Result<BlockVector, LaError>;
    /// Whether the operator satisfies `A = A^T` exactly.
    fn is_complex_symmetric(&self) -> bool;
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, v: &BlockVector) -> Result<BlockVector, LaError> {
        (**self).apply(v)
    }
    fn is_complex_symmetric(&self) -> bool {
        (**self).is_complex_symmetric()
    }
}

impl SymMatrix {
    /// CSR matrix from fully expanded `(row, col, value)` triplets, 0-based.
    /// Duplicates are rejected.
    pub fn from_triplets(
        n: usize,
        mut triplets: Vec<(usize, usize, Complex64)>,
        symmetry: Symmetry,
    ) -> Result<Self, LaError> {
        if n == 0 {
            return Err(LaError::InvalidShape(
                "matrix order must be at least 1".into(),
            ));
        }
        if let Some(&(row, col, _)) = triplets.iter().find(|t| t.0 >= n || t.1 >= n) {
            return Err(LaError::OutOfBounds { row, col, n });
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = triplets
            .windows(2)
            .find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1)
        {
            return Err(LaError::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &triplets {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = triplets.iter().map(|t| t.1).collect();
        let values = triplets.iter().map(|t| t.2).collect();
        Ok(Self {
            n,
            storage: Storage::Csr {
                row_ptr,
                col_idx,
                values,
            },
            symmetry,
        })
    }

    pub fn from_dense_row_major(
        n: usize,
        values: Vec<Complex64>,
        symmetry: Symmetry,
    ) -> Result<Self, LaError> {
        if n == 0 {
            return Err(LaError::InvalidShape(
                "matrix order must be at least 1".into(),
            ));
        }
        if values.len() != n * n {
            return Err(mismatch(
                "SymMatrix::from_dense_row_major",
                n * n,
                values.len(),
            ));
        }
        Ok(Self {
            n,
            storage: Storage::Dense(values),
            symmetry,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let triplets = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), triplets, Symmetry::ComplexSymmetric)
            .expect("diagonal is well formed")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    /// Stored entries (CSR) or `n^2` (dense).
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Csr { values, .. } => values.len(),
            Storage::Dense(v) => v.len(),
        }
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        match &self.storage {
            Storage::Csr {
                row_ptr,
                col_idx,
                values,
            } => {
                let row = row_ptr[i]..row_ptr[i + 1];
                match col_idx[row.clone()].binary_search(&j) {
                    Ok(k) => values[row.start + k],
                    Err(_) => Complex64::new(0.0, 0.0),
                }
            }
            Storage::Dense(v) => v[i * self.n + j],
        }
    }

    /// Stored entries in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        match &self.storage {
            Storage::Csr {
                row_ptr,
                col_idx,
                values,
            } => (0..self.n)
                .flat_map(|i| (row_ptr[i]..row_ptr[i + 1]).map(move |k| (i, col_idx[k], values[k])))
                .collect(),
            Storage::Dense(v) => (0..self.n * self.n)
                .map(|k| (k / self.n, k % self.n, v[k]))
                .collect(),
        }
    }

    pub fn to_dense_row_major(&self) -> Vec<Complex64> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Csr { .. } => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.n * self.n];
                for (i, j, v) in self.entries() {
                    out[i * self.n + j] = v;
                }
                out
            }
        }
    }

    /// True iff `A_ij == A_ji` exactly for every stored entry.
    pub fn check_complex_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Csr { .. } => self
                .entries()
                .into_iter()
                .all(|(i, j, v)| self.get(j, i) == v),
            Storage::Dense(v) => {
                (0..self.n).all(|i| (0..i).all(|j| v[i * self.n + j] == v[j * self.n + i]))
            }
        }
    }
}

impl LinearOperator for SymMatrix {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, v: &BlockVector) -> Result<BlockVector, LaError> {
        block_matvec(self, v)
    }
    fn is_complex_symmetric(&self) -> bool {
        self.check_complex_symmetric()
    }
}

/// `A V`. Each output entry is accumulated along row `i` of `A` in storage order.
pub fn block_matvec(a: &SymMatrix, v: &BlockVector) -> Result<BlockVector, LaError> {
    if a.n != v.n() {
        return Err(mismatch("block_matvec", a.n, v.n()));
    }
    let (n, p) = (a.n, v.p());
    let mut out = BlockVector::zeros(n, p);
    let src = v.as_slice();
    let dst = out.as_mut_slice();
    match &a.storage {
        Storage::Csr {
            row_ptr,
            col_idx,
            values,
        } => {
            for i in 0..n {
                let row = row_ptr[i]..row_ptr[i + 1];
                for c in 0..p {
                    let col = &src[c * n..(c + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in row.clone() {
                        acc += values[k] * col[col_idx[k]];
                    }
                    dst[c * n + i] = acc;
                }
            }
        }
        Storage::Dense(vals) => {
            for i in 0..n {
                let row = &vals[i * n..(i + 1) * n];
                for c in 0..p {
                    let col = &src[c * n..(c + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a_ik, v_k) in row.iter().zip(col) {
                        acc += a_ik * v_k;
                    }
                    dst[c * n + i] = acc;
                }
            }
        }
    }
    Ok(out)
}

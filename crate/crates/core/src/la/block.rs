use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::{fro_norm, mismatch, LaError, SmallMatrix};

/// An `n x p` complex block of column vectors, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector {
    n: usize,
    p: usize,
    data: Vec<Complex64>,
}

impl BlockVector {
    /// Zero block. Panics unless `1 <= p <= n`.
    pub fn zeros(n: usize, p: usize) -> Self {
        assert!(
            p >= 1 && p <= n,
            "block vector needs 1 <= p <= n (n = {n}, p = {p})"
        );
        Self {
            n,
            p,
            data: vec![Complex64::new(0.0, 0.0); n * p],
        }
    }

    pub fn from_fn(n: usize, p: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut out = Self::zeros(n, p);
        for j in 0..p {
            for i in 0..n {
                out.data[j * n + i] = f(i, j);
            }
        }
        out
    }

    /// Wraps column-major storage.
    pub fn from_col_major(n: usize, p: usize, data: Vec<Complex64>) -> Result<Self, LaError> {
        if p == 0 || p > n {
            return Err(LaError::InvalidShape(format!(
                "block vector needs 1 <= p <= n (n = {n}, p = {p})"
            )));
        }
        if data.len() != n * p {
            return Err(mismatch("BlockVector::from_col_major", n * p, data.len()));
        }
        Ok(Self { n, p, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn fro_norm(&self) -> f64 {
        fro_norm(self)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), LaError> {
        if self.n != other.n || self.p != other.p {
            return Err(mismatch(
                op,
                format!("{}x{}", self.n, self.p),
                format!("{}x{}", other.n, other.p),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaError> {
        self.check_same_shape(other, "BlockVector::add")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { data, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaError> {
        self.check_same_shape(other, "BlockVector::sub")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { data, ..*self })
    }

    /// `self * c` for a `p x p` coefficient matrix.
    pub fn mul_small(&self, c: &SmallMatrix) -> Result<Self, LaError> {
        let zero = Self::zeros(self.n, self.p);
        axpy_block(&zero, self, c)
    }

    /// Unconjugated transpose product `self^T * other`.
    pub fn t_gram(&self, other: &Self) -> Result<SmallMatrix, LaError> {
        t_gram(self, other)
    }

    /// Conjugated product `self^H * other`.
    pub fn h_gram(&self, other: &Self) -> Result<SmallMatrix, LaError> {
        self.check_same_shape(other, "BlockVector::h_gram")?;
        Ok(SmallMatrix::from_fn(self.p, |i, j| {
            self.col(i)
                .iter()
                .zip(other.col(j))
                .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
        }))
    }
}

impl AsRef<[Complex64]> for BlockVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.data
    }
}

impl Index<(usize, usize)> for BlockVector {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.n && j < self.p);
        &self.data[j * self.n + i]
    }
}

impl IndexMut<(usize, usize)> for BlockVector {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.n && j < self.p);
        &mut self.data[j * self.n + i]
    }
}

/// `V^T W` with no complex conjugation. This is the bilinear form behind
/// conjugate orthogonality: it can vanish on nonzero vectors.
pub fn t_gram(v: &BlockVector, w: &BlockVector) -> Result<SmallMatrix, LaError> {
    v.check_same_shape(w, "t_gram")?;
    Ok(SmallMatrix::from_fn(v.p, |i, j| {
        v.col(i)
            .iter()
            .zip(w.col(j))
            .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
    }))
}

/// `X + Y C`.
pub fn axpy_block(
    x: &BlockVector,
    y: &BlockVector,
    c: &SmallMatrix,
) -> Result<BlockVector, LaError> {
    x.check_same_shape(y, "axpy_block")?;
    if c.order() != y.p {
        return Err(mismatch(
            "axpy_block",
            format!("{0}x{0} coefficients", y.p),
            c.order(),
        ));
    }
    let mut out = x.clone();
    for j in 0..y.p {
        let dst = &mut out.data[j * x.n..(j + 1) * x.n];
        for k in 0..y.p {
            let ckj = c[(k, j)];
            for (d, yk) in dst.iter_mut().zip(y.col(k)) {
                *d += yk * ckj;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Small deterministic filler for tests; the seeded generators live in `oracle`.
    fn lcg_block(n: usize, p: usize, seed: u64) -> BlockVector {
        let mut s = seed;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
        };
        BlockVector::from_fn(n, p, |_, _| c(next(), next()))
    }

    #[test]
    fn t_gram_is_unconjugated() {
        let v = BlockVector::from_col_major(2, 1, vec![c(1.0, 1.0), c(1.0, -1.0)]).unwrap();
        let g = t_gram(&v, &v).unwrap();
        assert_eq!(g[(0, 0)], c(0.0, 0.0));
        // the Hermitian form of the same vector is its squared norm
        assert_eq!(v.h_gram(&v).unwrap()[(0, 0)], c(4.0, 0.0));
    }

    #[test]
    fn t_gram_of_identity_columns() {
        let v = BlockVector::from_fn(2, 2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(t_gram(&v, &v).unwrap(), SmallMatrix::identity(2));
    }

    #[test]
    fn t_gram_matches_triple_loop() {
        let v = lcg_block(20, 3, 1);
        let w = lcg_block(20, 3, 2);
        let g = t_gram(&v, &w).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = c(0.0, 0.0);
                for k in 0..20 {
                    acc += v[(k, i)] * w[(k, j)];
                }
                assert!((g[(i, j)] - acc).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn t_gram_rejects_shape_mismatch() {
        assert!(t_gram(&BlockVector::zeros(4, 2), &BlockVector::zeros(5, 2)).is_err());
        assert!(t_gram(&BlockVector::zeros(4, 2), &BlockVector::zeros(4, 3)).is_err());
    }

    #[test]
    fn axpy_block_special_coefficients() {
        let x = lcg_block(6, 2, 3);
        let y = lcg_block(6, 2, 4);
        assert_eq!(axpy_block(&x, &y, &SmallMatrix::zeros(2)).unwrap(), x);
        assert_eq!(
            axpy_block(&x, &y, &SmallMatrix::identity(2)).unwrap(),
            x.add(&y).unwrap()
        );
    }

    #[test]
    fn axpy_block_matches_loops() {
        let (n, p) = (9, 3);
        let x = lcg_block(n, p, 5);
        let y = lcg_block(n, p, 6);
        let cm = SmallMatrix::from_fn(p, |i, j| {
            c(i as f64 - 0.5 * j as f64, 0.25 * (i + j) as f64)
        });
        let out = axpy_block(&x, &y, &cm).unwrap();
        for i in 0..n {
            for j in 0..p {
                let mut acc = x[(i, j)];
                for k in 0..p {
                    acc += y[(i, k)] * cm[(k, j)];
                }
                assert!((out[(i, j)] - acc).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn axpy_block_rejects_wrong_order() {
        let x = BlockVector::zeros(4, 2);
        assert!(axpy_block(&x, &x, &SmallMatrix::zeros(3)).is_err());
    }

    #[test]
    fn shape_invariants() {
        assert!(BlockVector::from_col_major(2, 3, vec![c(0.0, 0.0); 6]).is_err());
        assert!(BlockVector::from_col_major(2, 0, vec![]).is_err());
        assert!(BlockVector::from_col_major(3, 2, vec![c(0.0, 0.0); 5]).is_err());
    }
}

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::{fro_norm, mismatch, LaError};

/// Relative pivot threshold used by [`solve_small`] unless configured otherwise.
pub const DEFAULT_PIVOT_FLOOR: f64 = 1e-14;

/// A `p x p` complex matrix (coefficient and Gram blocks), column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix {
    p: usize,
    data: Vec<Complex64>,
}

impl SmallMatrix {
    pub fn zeros(p: usize) -> Self {
        Self {
            p,
            data: vec![Complex64::new(0.0, 0.0); p * p],
        }
    }

    pub fn identity(p: usize) -> Self {
        Self::from_fn(p, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(p * p);
        for j in 0..p {
            for i in 0..p {
                data.push(f(i, j));
            }
        }
        Self { p, data }
    }

    /// Builds from row-major nested rows, convenient for literals.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LaError> {
        let p = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(mismatch("SmallMatrix::from_rows", p, bad.len()));
        }
        Ok(Self::from_fn(p, |i, j| rows[i][j]))
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.p, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaError> {
        if self.p != other.p {
            return Err(mismatch("SmallMatrix::mul", self.p, other.p));
        }
        Ok(Self::from_fn(self.p, |i, j| {
            (0..self.p).fold(Complex64::new(0.0, 0.0), |acc, k| {
                acc + self[(i, k)] * other[(k, j)]
            })
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaError> {
        if self.p != other.p {
            return Err(mismatch("SmallMatrix::sub", self.p, other.p));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { p: self.p, data })
    }

    pub fn fro_norm(&self) -> f64 {
        fro_norm(self)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, z| m.max(z.norm()))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.p).fold(Complex64::new(0.0, 0.0), |acc, i| acc + self[(i, i)])
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn solve(&self, rhs: &Self, pivot_floor: f64) -> Result<Self, LaError> {
        solve_small(self, rhs, pivot_floor)
    }
}

impl AsRef<[Complex64]> for SmallMatrix {
    fn as_ref(&self) -> &[Complex64] {
        &self.data
    }
}

impl Index<(usize, usize)> for SmallMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.p && j < self.p);
        &self.data[j * self.p + i]
    }
}

impl IndexMut<(usize, usize)> for SmallMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.p && j < self.p);
        &mut self.data[j * self.p + i]
    }
}

/// Solves `M Z = RHS` by LU with partial pivoting.
///
/// The Gram matrices fed here (`U^T U`, `R^T R`, ...) are complex symmetric,
/// not Hermitian, so Cholesky does not apply. A pivot whose modulus falls below
/// `pivot_floor * max|M_ij|` is reported as [`LaError::Singular`].
pub fn solve_small(
    m: &SmallMatrix,
    rhs: &SmallMatrix,
    pivot_floor: f64,
) -> Result<SmallMatrix, LaError> {
    let p = m.p;
    if rhs.p != p {
        return Err(mismatch("solve_small", p, rhs.p));
    }
    let threshold = pivot_floor * m.max_abs();
    let mut lu = m.clone();
    let mut z = rhs.clone();

    for k in 0..p {
        let (piv, mag) = (k..p)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold(
                (k, -1.0),
                |best, cand| if cand.1 > best.1 { cand } else { best },
            );
        if mag.partial_cmp(&threshold) != Some(Ordering::Greater) || mag == 0.0 {
            return Err(LaError::Singular {
                pivot_index: k,
                magnitude: mag,
            });
        }
        if piv != k {
            for j in 0..p {
                lu.data.swap(j * p + k, j * p + piv);
                z.data.swap(j * p + k, j * p + piv);
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..p {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            for j in k + 1..p {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
            for j in 0..p {
                let zk = z[(k, j)];
                z[(i, j)] -= l * zk;
            }
        }
    }

    for j in 0..p {
        for i in (0..p).rev() {
            let mut acc = z[(i, j)];
            for k in i + 1..p {
                acc -= lu[(i, k)] * z[(k, j)];
            }
            z[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_system_returns_rhs() {
        let rhs = SmallMatrix::from_fn(2, |i, j| c(i as f64 + 1.0, j as f64 - 3.0));
        assert_eq!(
            solve_small(&SmallMatrix::identity(2), &rhs, DEFAULT_PIVOT_FLOOR).unwrap(),
            rhs
        );
    }

    #[test]
    fn permutation_needs_pivoting() {
        let m = SmallMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let z = solve_small(&m, &SmallMatrix::identity(2), DEFAULT_PIVOT_FLOOR).unwrap();
        assert_eq!(z, m);
    }

    #[test]
    fn well_conditioned_residual() {
        let p = 6;
        let mut s = 42u64;
        let mut next = move || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut m = SmallMatrix::from_fn(p, |_, _| c(next(), next()));
        for i in 0..p {
            m[(i, i)] += c(4.0, 1.0);
        }
        let z = solve_small(&m, &SmallMatrix::identity(p), DEFAULT_PIVOT_FLOOR).unwrap();
        let resid = m.mul(&z).unwrap().sub(&SmallMatrix::identity(p)).unwrap();
        assert!(resid.fro_norm() <= 1e-12);
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        // rank one: second row is twice the first
        let m = SmallMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(2.0, 2.0), c(4.0, 0.0)],
        ])
        .unwrap();
        match solve_small(&m, &SmallMatrix::identity(2), DEFAULT_PIVOT_FLOOR) {
            Err(LaError::Singular {
                pivot_index,
                magnitude,
            }) => {
                assert_eq!(pivot_index, 1);
                assert!(magnitude < 1e-14 * m.max_abs());
            }
            other => panic!("expected singular, got {other:?}"),
        }
        assert!(matches!(
            solve_small(
                &SmallMatrix::zeros(3),
                &SmallMatrix::identity(3),
                DEFAULT_PIVOT_FLOOR
            ),
            Err(LaError::Singular { pivot_index: 0, .. })
        ));
    }

    #[test]
    fn order_mismatch() {
        assert!(solve_small(
            &SmallMatrix::identity(2),
            &SmallMatrix::identity(3),
            DEFAULT_PIVOT_FLOOR
        )
        .is_err());
    }
}

use num_complex::Complex64;

use super::{BlockVector, LaError, SmallMatrix};

/// Economy-size QR factors `W = Q xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    /// `n x p` with orthonormal columns (`Q^H Q = I`).
    pub q: BlockVector,
    /// `p x p` upper triangular, real nonnegative diagonal.
    pub xi: SmallMatrix,
}

/// Householder thin QR of an `n x p` block, `n >= p`.
///
/// Each reflector maps the active column onto `-phase * ||x|| e_1`; afterwards
/// row `k` of `xi` and column `k` of `Q` are rescaled by a unit-modulus factor
/// so the diagonal of `xi` is real and nonnegative. A column that is exactly
/// zero below the diagonal gets no reflector and a zero diagonal entry; rank
/// deficiency is left for the caller to detect through the diagonal.
pub fn thin_qr(w: &BlockVector) -> Result<QrFactors, LaError> {
    let (n, p) = (w.n(), w.p());
    if n < p {
        return Err(LaError::TooFewRows { n, p });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut a = w.clone();
    let mut reflectors: Vec<Option<(Vec<Complex64>, f64)>> = Vec::with_capacity(p);

    for k in 0..p {
        let x = &a.col(k)[k..];
        let norm = x.iter().fold(0.0, |s, z| s + z.norm_sqr()).sqrt();
        if norm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(0.0, |s, z| s + z.norm_sqr());
        apply_reflector(&mut a, k, &v, vnorm2, k + 1..p);
        let col = a.col_mut(k);
        col[k] = alpha;
        col[k + 1..].iter_mut().for_each(|z| *z = zero);
        reflectors.push(Some((v, vnorm2)));
    }

    let mut xi = SmallMatrix::from_fn(p, |i, j| if i <= j { a[(i, j)] } else { zero });
    let mut q = BlockVector::from_fn(n, p, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            zero
        }
    });
    for (k, r) in reflectors.iter().enumerate().rev() {
        if let Some((v, vnorm2)) = r {
            apply_reflector(&mut q, k, v, *vnorm2, 0..p);
        }
    }

    for k in 0..p {
        let d = xi[(k, k)];
        if d.norm() == 0.0 {
            continue;
        }
        let phase = d / d.norm();
        for j in k..p {
            xi[(k, j)] *= phase.conj();
        }
        xi[(k, k)] = Complex64::new(xi[(k, k)].norm(), 0.0);
        q.col_mut(k).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(QrFactors { q, xi })
}

/// Applies `I - 2 v v^H / (v^H v)` acting on rows `offset..` to the given columns.
fn apply_reflector(
    m: &mut BlockVector,
    offset: usize,
    v: &[Complex64],
    vnorm2: f64,
    cols: std::ops::Range<usize>,
) {
    for j in cols {
        let col = &mut m.col_mut(j)[offset..];
        let s = v
            .iter()
            .zip(col.iter())
            .fold(Complex64::new(0.0, 0.0), |acc, (vi, ci)| {
                acc + vi.conj() * ci
            });
        let f = s * (2.0 / vnorm2);
        for (ci, vi) in col.iter_mut().zip(v) {
            *ci -= vi * f;
        }
    }
}

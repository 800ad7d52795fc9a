use crate::la::{axpy_block, thin_qr, BlockVector, LaError, LinearOperator, SmallMatrix};

use super::{gram_solve, GramSystem, Method, ResidualView, Snapshot, SolverConfig, StepError};

fn neg(c: &SmallMatrix) -> SmallMatrix {
    SmallMatrix::zeros(c.order()).sub(c).expect("same order")
}

/// Block COCG iterate: `X_m, R_m, P_m`.
pub struct CocgState {
    x: BlockVector,
    r: BlockVector,
    p: BlockVector,
}

impl Method for CocgState {
    fn init<O: LinearOperator>(op: &O, b: &BlockVector, x0: &BlockVector) -> Result<Self, LaError> {
        let r = b.sub(&op.apply(x0)?)?;
        Ok(Self {
            x: x0.clone(),
            p: r.clone(),
            r,
        })
    }

    fn residual_norm(&self) -> f64 {
        self.r.fro_norm()
    }

    fn step<O: LinearOperator>(&mut self, op: &O, cfg: &SolverConfig) -> Result<(), StepError> {
        let floor = cfg.breakdown_pivot_floor;
        let ap = op.apply(&self.p)?;
        let rtr = self.r.t_gram(&self.r)?;
        let alpha = gram_solve(&self.p.t_gram(&ap)?, &rtr, floor, GramSystem::Alpha)?;
        self.x = axpy_block(&self.x, &self.p, &alpha)?;
        self.r = axpy_block(&self.r, &ap, &neg(&alpha))?;
        let beta = gram_solve(&rtr, &self.r.t_gram(&self.r)?, floor, GramSystem::Beta)?;
        self.p = axpy_block(&self.r, &self.p, &beta)?;
        Ok(())
    }

    fn snapshot(&self, iteration: usize) -> Snapshot<'_> {
        Snapshot {
            iteration,
            x: &self.x,
            residual: ResidualView::Plain(&self.r),
            direction: &self.p,
            a_direction: None,
        }
    }

    fn into_x(self) -> BlockVector {
        self.x
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.r.is_finite()
    }
}

/// Block COCG with residual orthonormalization: `X_m, Q_m, xi_m, S_m` where
/// `R_m = Q_m xi_m` and `S_m = P_m xi_m^{-1}`.
///
/// Substituting these into the unscaled recurrences gives
/// `alpha'_m = xi_m alpha_m xi_m^{-1}`, `tau_{m+1} = xi_{m+1} xi_m^{-1}` and
/// `beta'_m = xi_m beta_m xi_{m+1}^{-1}`; none of the inverses is formed.
pub struct CocgRqState {
    x: BlockVector,
    q: BlockVector,
    xi: SmallMatrix,
    s: BlockVector,
}

impl Method for CocgRqState {
    fn init<O: LinearOperator>(op: &O, b: &BlockVector, x0: &BlockVector) -> Result<Self, LaError> {
        let r = b.sub(&op.apply(x0)?)?;
        let f = thin_qr(&r)?;
        Ok(Self {
            x: x0.clone(),
            s: f.q.clone(),
            q: f.q,
            xi: f.xi,
        })
    }

    fn residual_norm(&self) -> f64 {
        self.xi.fro_norm()
    }

    fn step<O: LinearOperator>(&mut self, op: &O, cfg: &SolverConfig) -> Result<(), StepError> {
        let floor = cfg.breakdown_pivot_floor;
        let a_s = op.apply(&self.s)?;
        let qtq = self.q.t_gram(&self.q)?;
        let alpha = gram_solve(&self.s.t_gram(&a_s)?, &qtq, floor, GramSystem::Alpha)?;
        self.x = axpy_block(&self.x, &self.s, &alpha.mul(&self.xi)?)?;
        let f = thin_qr(&axpy_block(&self.q, &a_s, &neg(&alpha))?)?;
        let tau = f.xi;
        self.q = f.q;
        self.xi = tau.mul(&self.xi)?;
        let rhs = tau.transpose().mul(&self.q.t_gram(&self.q)?)?;
        let beta = gram_solve(&qtq, &rhs, floor, GramSystem::Beta)?;
        self.s = axpy_block(&self.q, &self.s, &beta)?;
        Ok(())
    }

    fn snapshot(&self, iteration: usize) -> Snapshot<'_> {
        Snapshot {
            iteration,
            x: &self.x,
            residual: ResidualView::Factored {
                q: &self.q,
                xi: &self.xi,
            },
            direction: &self.s,
            a_direction: None,
        }
    }

    fn into_x(self) -> BlockVector {
        self.x
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.q.is_finite() && self.xi.is_finite()
    }

    fn xi_diag_range(&self) -> Option<(f64, f64)> {
        Some(diag_range(&self.xi))
    }
}

pub(super) fn diag_range(xi: &SmallMatrix) -> (f64, f64) {
    (0..xi.order()).fold((f64::INFINITY, 0.0), |(lo, hi), k| {
        let d = xi[(k, k)].norm();
        (lo.min(d), hi.max(d))
    })
}

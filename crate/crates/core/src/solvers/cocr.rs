use crate::la::{axpy_block, thin_qr, BlockVector, LaError, LinearOperator, SmallMatrix};

use super::cocg::diag_range;
use super::{
    gram_solve, CocrRqAlphaRhs, GramSystem, Method, ResidualView, Snapshot, SolverConfig, StepError,
};

fn neg(c: &SmallMatrix) -> SmallMatrix {
    SmallMatrix::zeros(c.order()).sub(c).expect("same order")
}

/// Block COCR iterate: `X_m, R_m, P_m, U_m = A P_m, V_m = A R_m`.
pub struct CocrState {
    x: BlockVector,
    r: BlockVector,
    p: BlockVector,
    u: BlockVector,
    v: BlockVector,
}

impl Method for CocrState {
    fn init<O: LinearOperator>(op: &O, b: &BlockVector, x0: &BlockVector) -> Result<Self, LaError> {
        let r = b.sub(&op.apply(x0)?)?;
        let v = op.apply(&r)?;
        Ok(Self {
            x: x0.clone(),
            p: r.clone(),
            r,
            u: v.clone(),
            v,
        })
    }

    fn residual_norm(&self) -> f64 {
        self.r.fro_norm()
    }

    fn step<O: LinearOperator>(&mut self, op: &O, cfg: &SolverConfig) -> Result<(), StepError> {
        let floor = cfg.breakdown_pivot_floor;
        let rtv = self.r.t_gram(&self.v)?;
        let alpha = gram_solve(&self.u.t_gram(&self.u)?, &rtv, floor, GramSystem::Alpha)?;
        self.x = axpy_block(&self.x, &self.p, &alpha)?;
        self.r = axpy_block(&self.r, &self.u, &neg(&alpha))?;
        self.v = op.apply(&self.r)?;
        let beta = gram_solve(&rtv, &self.r.t_gram(&self.v)?, floor, GramSystem::Beta)?;
        self.p = axpy_block(&self.r, &self.p, &beta)?;
        // A P_{m+1} by recurrence, no second product
        self.u = axpy_block(&self.v, &self.u, &beta)?;
        Ok(())
    }

    fn snapshot(&self, iteration: usize) -> Snapshot<'_> {
        Snapshot {
            iteration,
            x: &self.x,
            residual: ResidualView::Plain(&self.r),
            direction: &self.p,
            a_direction: Some(&self.u),
        }
    }

    fn into_x(self) -> BlockVector {
        self.x
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.r.is_finite() && self.u.is_finite()
    }
}

/// Block COCR with residual orthonormalization: `X_m, Q_m, xi_m, S_m`,
/// `U_m = A S_m`, `V_m = A Q_m`.
///
/// The solution update is `X_{m+1} = X_m + S_m alpha'_m xi_m`, and the beta
/// system is solved for `beta'_m`, the matrix consumed by the `S` and `U`
/// updates. The alpha right-hand side is chosen by
/// [`SolverConfig::cocr_rq_alpha_rhs`].
pub struct CocrRqState {
    x: BlockVector,
    q: BlockVector,
    xi: SmallMatrix,
    s: BlockVector,
    u: BlockVector,
    v: BlockVector,
}

impl Method for CocrRqState {
    fn init<O: LinearOperator>(op: &O, b: &BlockVector, x0: &BlockVector) -> Result<Self, LaError> {
        let r = b.sub(&op.apply(x0)?)?;
        let f = thin_qr(&r)?;
        let v = op.apply(&f.q)?;
        Ok(Self {
            x: x0.clone(),
            s: f.q.clone(),
            q: f.q,
            xi: f.xi,
            u: v.clone(),
            v,
        })
    }

    fn residual_norm(&self) -> f64 {
        self.xi.fro_norm()
    }

    fn step<O: LinearOperator>(&mut self, op: &O, cfg: &SolverConfig) -> Result<(), StepError> {
        let floor = cfg.breakdown_pivot_floor;
        let qtv = self.q.t_gram(&self.v)?;
        let projected = match cfg.cocr_rq_alpha_rhs {
            CocrRqAlphaRhs::QtV => qtv.clone(),
            CocrRqAlphaRhs::QtU => self.q.t_gram(&self.u)?,
        };
        let alpha = gram_solve(
            &self.u.t_gram(&self.u)?,
            &projected,
            floor,
            GramSystem::Alpha,
        )?;
        self.x = axpy_block(&self.x, &self.s, &alpha.mul(&self.xi)?)?;
        let f = thin_qr(&axpy_block(&self.q, &self.u, &neg(&alpha))?)?;
        let tau = f.xi;
        self.q = f.q;
        self.xi = tau.mul(&self.xi)?;
        self.v = op.apply(&self.q)?;
        let rhs = tau.transpose().mul(&self.q.t_gram(&self.v)?)?;
        let beta = gram_solve(&qtv, &rhs, floor, GramSystem::Beta)?;
        self.s = axpy_block(&self.q, &self.s, &beta)?;
        self.u = axpy_block(&self.v, &self.u, &beta)?;
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
            a_direction: Some(&self.u),
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

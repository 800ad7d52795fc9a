mod common;

use blocksym::la::{block_matvec, t_gram};
use blocksym::oracle::{scalar_cocg_history, scalar_cocr_history};
use blocksym::solvers::{solve, solve_observed, CocrRqAlphaRhs, Snapshot};
use blocksym::{BlockVector, SolverConfig, SolverKind, SymMatrix};
use common::*;

/// Runs `kind` and keeps `(R_m, P_m)` for every iterate.
fn record(
    kind: SolverKind,
    a: &SymMatrix,
    b: &BlockVector,
    cfg: &SolverConfig,
) -> Vec<(BlockVector, BlockVector, BlockVector)> {
    let mut seen = Vec::new();
    let x0 = BlockVector::zeros(b.n(), b.p());
    solve_observed(kind, a, b, &x0, cfg, &mut |s: &Snapshot<'_>| {
        seen.push((s.x.clone(), s.residual.to_block(), s.direction.clone()));
    })
    .unwrap();
    seen
}

fn normalized(v: &BlockVector, w: &BlockVector) -> f64 {
    t_gram(v, w).unwrap().fro_norm() / (v.fro_norm() * w.fro_norm())
}

#[test]
fn recursive_residual_tracks_true_residual() {
    let (a, b) = sparse_diag_dominant(100, 4, 17, 0.2);
    let cfg = SolverConfig::default().with_max_iter(50);
    let b_norm = b.fro_norm();
    for kind in SolverKind::ALL {
        let seen = record(kind, &a, &b, &cfg);
        assert!(seen.len() > 5, "{kind}");
        for (m, (x, r, _)) in seen.iter().enumerate() {
            let true_r = b.sub(&block_matvec(&a, x).unwrap()).unwrap();
            let gap = true_r.sub(r).unwrap().fro_norm() / b_norm;
            assert!(gap <= 1e-8, "{kind} m={m}: gap {gap:e}");
        }
    }
}

#[test]
fn factored_residual_norm_equals_xi_norm() {
    let (a, b) = sparse_diag_dominant(100, 4, 17, 0.2);
    for kind in [SolverKind::CocgRq, SolverKind::CocrRq] {
        let mut worst = 0.0f64;
        solve_observed(
            kind,
            &a,
            &b,
            &BlockVector::zeros(100, 4),
            &SolverConfig::default(),
            &mut |s| {
                if let blocksym::solvers::ResidualView::Factored { q, xi } = s.residual {
                    let lhs = q.mul_small(xi).unwrap().fro_norm();
                    worst = worst.max((lhs - xi.fro_norm()).abs() / xi.fro_norm());
                } else {
                    panic!("{kind} should expose a factored residual");
                }
            },
        )
        .unwrap();
        assert!(worst <= 1e-12, "{kind}: {worst:e}");
    }
}

#[test]
fn cocg_block_conjugate_orthogonality() {
    let (a, b) = sparse_diag_dominant(100, 4, 5, 0.2);
    let seen = record(SolverKind::Cocg, &a, &b, &SolverConfig::default());
    assert!(seen.len() >= 11, "only {} iterates", seen.len());
    let ap: Vec<BlockVector> = seen
        .iter()
        .map(|(_, _, p)| block_matvec(&a, p).unwrap())
        .collect();
    for i in 0..=10 {
        for j in 0..=10 {
            if i == j {
                continue;
            }
            let rr = normalized(&seen[i].1, &seen[j].1);
            let pap = t_gram(&seen[i].2, &ap[j]).unwrap().fro_norm()
                / (seen[i].2.fro_norm() * ap[j].fro_norm());
            assert!(rr <= 1e-8, "R{i}^T R{j}: {rr:e}");
            assert!(pap <= 1e-8, "P{i}^T A P{j}: {pap:e}");
        }
    }
}

#[test]
fn cocr_block_conjugate_a_orthogonality() {
    let (a, b) = sparse_diag_dominant(100, 4, 5, 0.2);
    let seen = record(SolverKind::Cocr, &a, &b, &SolverConfig::default());
    assert!(seen.len() >= 11, "only {} iterates", seen.len());
    let ar: Vec<BlockVector> = seen
        .iter()
        .map(|(_, r, _)| block_matvec(&a, r).unwrap())
        .collect();
    let ap: Vec<BlockVector> = seen
        .iter()
        .map(|(_, _, p)| block_matvec(&a, p).unwrap())
        .collect();
    for i in 0..=10 {
        for j in 0..=10 {
            if i == j {
                continue;
            }
            let rar = t_gram(&seen[i].1, &ar[j]).unwrap().fro_norm()
                / (seen[i].1.fro_norm() * ar[j].fro_norm());
            let apap = normalized(&ap[i], &ap[j]);
            assert!(rar <= 1e-8, "R{i}^T A R{j}: {rar:e}");
            assert!(apap <= 1e-8, "(AP{i})^T (AP{j}): {apap:e}");
        }
    }
}

#[test]
fn rq_histories_follow_unscaled_methods() {
    let (a, b) = diag_dominant(50, 4, 23);
    let cfg = SolverConfig::default().with_tol(1e-14).with_max_iter(20);
    let x0 = BlockVector::zeros(50, 4);
    for (plain, rq) in [
        (SolverKind::Cocg, SolverKind::CocgRq),
        (SolverKind::Cocr, SolverKind::CocrRq),
    ] {
        let h1 = solve(plain, &a, &b, &x0, &cfg).unwrap().history;
        let h2 = solve(rq, &a, &b, &x0, &cfg).unwrap().history;
        let k = h1.len().min(h2.len()).min(21);
        assert!(k >= 10, "{plain}: only {k} iterates");
        for m in 0..k {
            let rel = (h1[m] - h2[m]).abs() / h1[m];
            assert!(rel <= 1e-6, "{plain} vs {rq} at m={m}: {rel:e}");
        }
    }
}

#[test]
fn single_rhs_matches_scalar_reference() {
    let (a, b) = diag_dominant(50, 1, 31);
    let cfg = SolverConfig::default();
    let x0 = BlockVector::zeros(50, 1);
    for (kind, reference) in [
        (
            SolverKind::Cocg,
            scalar_cocg_history(&a, b.col(0), 1e-10, 50),
        ),
        (
            SolverKind::Cocr,
            scalar_cocr_history(&a, b.col(0), 1e-10, 50),
        ),
    ] {
        let hist = solve(kind, &a, &b, &x0, &cfg).unwrap().history;
        assert_eq!(hist.len(), reference.len(), "{kind}");
        for (m, (h, r)) in hist.iter().zip(&reference).enumerate() {
            assert!((h - r).abs() <= 1e-10 * r, "{kind} m={m}: {h:e} vs {r:e}");
        }
    }
}

#[test]
fn cocr_rq_alpha_forms_agree() {
    let (a, b) = diag_dominant(50, 4, 29);
    let x0 = BlockVector::zeros(50, 4);
    let qtv = SolverConfig::default();
    let qtu = SolverConfig {
        cocr_rq_alpha_rhs: CocrRqAlphaRhs::QtU,
        ..SolverConfig::default()
    };
    let r1 = solve(SolverKind::CocrRq, &a, &b, &x0, &qtv).unwrap();
    let r2 = solve(SolverKind::CocrRq, &a, &b, &x0, &qtu).unwrap();
    assert!(r1.converged() && r2.converged());
    assert_eq!(r1.iterations, r2.iterations);
    for (m, (h1, h2)) in r1.history.iter().zip(&r2.history).enumerate() {
        assert!((h1 - h2).abs() <= 1e-6 * h1, "m={m}: {h1:e} vs {h2:e}");
    }
    assert!(rel_diff(&r1.x, &r2.x) <= 1e-8);
}

#[test]
fn one_product_per_iteration() {
    let (a, b) = sparse_diag_dominant(100, 4, 3, 0.2);
    let x0 = BlockVector::zeros(100, 4);
    for kind in SolverKind::ALL {
        let setup = match kind {
            SolverKind::Cocg | SolverKind::CocgRq => 1,
            SolverKind::Cocr | SolverKind::CocrRq => 2,
        };
        for cap in [1, 5, 100] {
            let op = Counting::new(&a);
            let res = solve(
                kind,
                &op,
                &b,
                &x0,
                &SolverConfig::default().with_max_iter(cap),
            )
            .unwrap();
            // one more product for the true residual at exit
            assert_eq!(
                op.calls.get(),
                setup + res.iterations + 1,
                "{kind} cap={cap}"
            );
        }
    }
}

#[test]
fn reruns_are_bitwise_identical() {
    let (a, b) = sparse_diag_dominant(80, 3, 41, 0.3);
    let x0 = BlockVector::zeros(80, 3);
    for kind in SolverKind::ALL {
        let mut r1 = solve(kind, &a, &b, &x0, &SolverConfig::default()).unwrap();
        let mut r2 = solve(kind, &a, &b, &x0, &SolverConfig::default()).unwrap();
        r1.elapsed = 0.0;
        r2.elapsed = 0.0;
        assert_eq!(r1, r2, "{kind}");
        assert_eq!(
            r1.history.iter().map(|h| h.to_bits()).collect::<Vec<_>>(),
            r2.history.iter().map(|h| h.to_bits()).collect::<Vec<_>>()
        );
    }
}

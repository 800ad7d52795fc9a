mod common;

use blocksym::la::{block_matvec, t_gram, thin_qr, Symmetry};
use blocksym::mm::{read_matrix_market, write_matrix_market};
use blocksym::oracle::{gen_problem, ProblemKind, ProblemSpec};
use blocksym::{BlockVector, Complex64, SmallMatrix, SymMatrix};
use common::*;
use proptest::prelude::*;

/// `(n, p, seed)` with `1 <= p <= min(n, 6)`.
fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..40).prop_flat_map(|n| (Just(n), 1..=n.min(6), any::<u64>()))
}

fn random_sym(n: usize, seed: u64) -> SymMatrix {
    gen_problem(
        &ProblemSpec::new(ProblemKind::DiagDominantComplexSymmetric, n, 1, seed).with_density(0.3),
    )
    .unwrap()
    .0
}

fn max_abs_diff(a: &SmallMatrix, b: &SmallMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matvec_is_linear((n, p, seed) in shape()) {
        let a = random_sym(n, seed);
        let v = random_block(n, p, seed ^ 1);
        let cm = random_small(p, seed ^ 2);
        let lhs = block_matvec(&a, &v.mul_small(&cm).unwrap()).unwrap();
        let rhs = block_matvec(&a, &v).unwrap().mul_small(&cm).unwrap();
        prop_assert!(rel_diff(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn t_gram_transposes_exactly((n, p, seed) in shape()) {
        let v = random_block(n, p, seed);
        let w = random_block(n, p, seed.wrapping_add(1));
        prop_assert_eq!(t_gram(&v, &w).unwrap(), t_gram(&w, &v).unwrap().transpose());
    }

    #[test]
    fn bilinear_form_is_a_symmetric((n, p, seed) in shape()) {
        let a = random_sym(n, seed);
        let v = random_block(n, p, seed ^ 3);
        let w = random_block(n, p, seed ^ 4);
        let lhs = t_gram(&v, &block_matvec(&a, &w).unwrap()).unwrap();
        let rhs = t_gram(&w, &block_matvec(&a, &v).unwrap()).unwrap().transpose();
        prop_assert!(lhs.sub(&rhs).unwrap().fro_norm() <= 1e-12 * lhs.fro_norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn thin_qr_invariants((n, p, seed) in shape()) {
        let w = random_block(n, p, seed);
        let f = thin_qr(&w).unwrap();
        let qhq = f.q.h_gram(&f.q).unwrap();
        prop_assert!(max_abs_diff(&qhq, &SmallMatrix::identity(p)) <= 1e-12);
        prop_assert!(rel_diff(&f.q.mul_small(&f.xi).unwrap(), &w) <= 1e-12);
        for i in 0..p {
            prop_assert!(f.xi[(i, i)].im == 0.0 && f.xi[(i, i)].re >= 0.0);
            for j in 0..i {
                prop_assert_eq!(f.xi[(i, j)], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn fro_norm_matches_hermitian_trace((n, p, seed) in shape()) {
        let v = random_block(n, p, seed);
        let tr = v.h_gram(&v).unwrap().trace().re;
        let f = v.fro_norm();
        prop_assert!((f * f - tr).abs() <= 1e-12 * tr);
    }
}

#[test]
fn thin_qr_seeded_30_by_5() {
    let w = random_block(30, 5, 2024);
    let f = thin_qr(&w).unwrap();
    assert!(max_abs_diff(&f.q.h_gram(&f.q).unwrap(), &SmallMatrix::identity(5)) <= 1e-12);
    assert!(rel_diff(&f.q.mul_small(&f.xi).unwrap(), &w) <= 1e-12);
}

#[test]
fn matvec_matches_dense_triple_loop() {
    let (a, _) = diag_dominant(50, 1, 77);
    let v = random_block(50, 4, 78);
    let dense = a.to_dense_row_major();
    let reference = BlockVector::from_fn(50, 4, |i, j| {
        (0..50).map(|k| dense[i * 50 + k] * v[(k, j)]).sum()
    });
    assert!(rel_diff(&block_matvec(&a, &v).unwrap(), &reference) <= 1e-13);
}

#[test]
fn dense_and_sparse_storage_agree() {
    let a = random_sym(25, 9);
    let dense =
        SymMatrix::from_dense_row_major(25, a.to_dense_row_major(), Symmetry::ComplexSymmetric)
            .unwrap();
    let v = random_block(25, 3, 10);
    assert!(
        rel_diff(
            &block_matvec(&dense, &v).unwrap(),
            &block_matvec(&a, &v).unwrap()
        ) <= 1e-14
    );
}

#[test]
fn fro_norm_matches_elementwise_loop() {
    let v = random_block(10, 3, 55);
    let mut sum = 0.0;
    for j in 0..3 {
        for i in 0..10 {
            sum += v[(i, j)].re * v[(i, j)].re + v[(i, j)].im * v[(i, j)].im;
        }
    }
    assert!((v.fro_norm() - sum.sqrt()).abs() <= 1e-15 * sum.sqrt());
}

#[test]
fn matrix_market_round_trip_is_exact() {
    for seed in 0..5 {
        let (a, _) = diag_dominant(50, 1, seed);
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let (header, back) = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(back.symmetry(), Symmetry::ComplexSymmetric, "{header:?}");
        assert_eq!(back.entries(), a.entries());
        assert!(back.check_complex_symmetric());
    }
}

#[test]
fn sparse_round_trip_keeps_pattern() {
    let a = random_sym(40, 12);
    let mut buf = Vec::new();
    write_matrix_market(&a, &mut buf).unwrap();
    let (_, back) = read_matrix_market(buf.as_slice()).unwrap();
    assert_eq!(back.nnz(), a.nnz());
    assert_eq!(back.entries(), a.entries());
}

mod common;

use common::*;
use nalgebra::DMatrix;
use poincare_core::l1_algebra::{
    determinant_ladder, finite_determinant, invertibility_test, poincare_determinant, trace_ladder, truncate,
    Invertibility, LatticeVector,
};
use poincare_core::lattice::{MultiIndex, TruncationWindow};
use poincare_core::{DeterminantOptions, Error, FiniteSection, SparseL1Matrix, TailModel};
use proptest::prelude::*;

fn arb_entry(dim: usize) -> impl Strategy<Value = (MultiIndex, MultiIndex, C)> {
    let idx = prop::collection::vec(-4i64..=4, dim).prop_map(MultiIndex::new);
    (idx.clone(), idx, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(r, c, a, b)| (r, c, C::new(a, b)))
}

fn arb_matrix() -> impl Strategy<Value = SparseL1Matrix<f64>> {
    (1usize..=2).prop_flat_map(|dim| {
        prop::collection::vec(arb_entry(dim), 0..40).prop_map(move |e| SparseL1Matrix::from_entries(dim, e).unwrap())
    })
}

fn arb_pair() -> impl Strategy<Value = (SparseL1Matrix<f64>, SparseL1Matrix<f64>)> {
    (1usize..=2).prop_flat_map(|dim| {
        let m = move || prop::collection::vec(arb_entry(dim), 0..30).prop_map(move |e| SparseL1Matrix::from_entries(dim, e).unwrap());
        (m(), m())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_subadditive_and_homogeneous((a, b) in arb_pair(), s in -3.0f64..3.0) {
        let sum = a.add(&b).unwrap();
        prop_assert!(sum.l1_norm() <= (a.l1_norm() + b.l1_norm()) * (1.0 + 1e-14));
        let scaled = a.scale(C::new(s, 0.0));
        prop_assert!((scaled.l1_norm() - s.abs() * a.l1_norm()).abs() <= 1e-12 * (1.0 + a.l1_norm()));
    }

    #[test]
    fn composition_is_associative_on_vectors((a, b) in arb_pair()) {
        let dim = a.dim();
        let x: LatticeVector<f64> = TruncationWindow::new(dim, 2).iter().enumerate()
            .map(|(i, k)| (k, C::new(i as f64 - 3.0, 1.0))).collect();
        let lhs = a.compose(&b).unwrap().apply(&x);
        let rhs = a.apply(&b.apply(&x));
        for k in lhs.keys().chain(rhs.keys()) {
            let d = lhs.get(k).copied().unwrap_or_default() - rhs.get(k).copied().unwrap_or_default();
            prop_assert!(d.norm() <= 1e-11);
        }
    }

    #[test]
    fn cached_norm_matches_recomputation(a in arb_matrix()) {
        prop_assert_eq!(a.l1_norm(), a.recompute_l1_norm());
        prop_assert_eq!(a.transpose().transpose(), a.clone());
    }

    #[test]
    fn truncation_splits_the_norm(a in arb_matrix(), r in 0usize..5) {
        let w = TruncationWindow::new(a.dim(), r);
        let t = truncate(&a, &TailModel::exact(), w);
        let split = t.section.l1_norm() + t.tail_norm;
        prop_assert!((split - a.l1_norm()).abs() <= 1e-12 * (1.0 + a.l1_norm()));
        prop_assert!(t.coupling_norm <= t.tail_norm);
    }

    #[test]
    fn determinant_is_bounded_by_exponential_norm(a in arb_matrix()) {
        let r = poincare_determinant(&a, &TailModel::exact(), &DeterminantOptions::default()).unwrap();
        prop_assert!(r.value.norm() <= a.l1_norm().exp() * (1.0 + 1e-12));
        let t = trace_ladder(&a, &TailModel::exact(), &DeterminantOptions::default()).unwrap();
        prop_assert!(t.value.norm() <= a.l1_norm() * (1.0 + 1e-12));
    }
}

#[test]
fn finite_support_is_exact_at_support_radius() {
    let mut rng = rng(11);
    for _ in 0..30 {
        let dim = 1 + (rng_u(&mut rng) % 2);
        let a = sparse(&mut rng, dim, 20, 3, 0.5);
        let w = TruncationWindow::new(dim, a.support_radius().unwrap_or(0));
        let direct = finite_determinant(&truncate(&a, &TailModel::exact(), w).section);
        let r = poincare_determinant(&a, &TailModel::exact(), &DeterminantOptions::default()).unwrap();
        assert!((r.value - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        assert!(r.certified_error <= 1e-10);
    }
}

fn rng_u(r: &mut impl rand::Rng) -> usize {
    r.gen_range(0..1000)
}

#[test]
fn rank_one_determinant_matches_matrix_determinant_lemma() {
    // Det(I + u vᵀ) = 1 + vᵀu.
    let w = TruncationWindow::new(2, 2);
    let pts: Vec<MultiIndex> = w.iter().collect();
    let u: Vec<C> = (0..pts.len()).map(|i| C::new(0.1 * i as f64, -0.05)).collect();
    let v: Vec<C> = (0..pts.len()).map(|i| C::new(0.02, 0.01 * (i % 3) as f64)).collect();
    let a = SparseL1Matrix::from_entries(
        2,
        (0..pts.len()).flat_map(|i| (0..pts.len()).map(move |j| (i, j))).map(|(i, j)| (pts[i].clone(), pts[j].clone(), u[i] * v[j])),
    )
    .unwrap();
    let expected = C::new(1.0, 0.0) + u.iter().zip(&v).map(|(x, y)| x * y).sum::<C>();
    let r = poincare_determinant(&a, &TailModel::exact(), &DeterminantOptions::default()).unwrap();
    assert!((r.value - expected).norm() < 1e-13);
}

#[test]
fn geometric_tail_ladder_is_certified() {
    // Diagonal 2^{-|k|}: product Π (1 + 2^{-|k|}) with geometric tail.
    let radius = 60i64;
    let a = SparseL1Matrix::diagonal(1, (-radius..=radius).map(|k| (MultiIndex::new(vec![k]), C::new(0.5f64.powi(k.abs() as i32), 0.0))))
        .unwrap();
    let tail = TailModel::geometric(4.0, 0.5).with_complete_radius(radius as usize);
    let r = poincare_determinant(&a, &tail, &DeterminantOptions::default()).unwrap();
    let oracle: f64 = 2.0 * (1..200).map(|k| 1.0 + 0.5f64.powi(k)).product::<f64>().powi(2);
    assert!((r.value.re - oracle).abs() <= r.certified_error.max(1e-12));
    assert!(r.certified_error <= 1e-8);
}

#[test]
fn singular_and_invertible_decisions() {
    let opts = DeterminantOptions::default();
    let minus_one = SparseL1Matrix::diagonal(1, [(MultiIndex::new(vec![0]), C::new(-1.0, 0.0))]).unwrap();
    assert_eq!(invertibility_test(&minus_one, &TailModel::exact(), &opts).unwrap(), Invertibility::Singular);
    let half = SparseL1Matrix::diagonal(1, [(MultiIndex::new(vec![2]), C::new(0.5, 0.0))]).unwrap();
    assert_eq!(invertibility_test(&half, &TailModel::exact(), &opts).unwrap(), Invertibility::Invertible);
}

#[test]
fn not_summable_tail_is_an_error() {
    let a = SparseL1Matrix::<f64>::zero(1);
    let err = determinant_ladder(&a, &TailModel::not_summable("identity"), &DeterminantOptions::default()).unwrap_err();
    assert!(matches!(err, Error::NotL1(_)));
}

#[test]
fn section_determinant_of_identity_block() {
    let w = TruncationWindow::new(1, 3);
    let f = FiniteSection::new(w, DMatrix::identity(7, 7));
    assert_eq!(finite_determinant(&f), C::new(128.0, 0.0));
}

use rayon::prelude::*;

use super::{GridFunction, ToroidalSymbol};
use crate::error::{Error, Result};
use crate::l1_algebra::{poincare_determinant, DeterminantOptions, DeterminantResult, SparseL1Matrix, TailModel};
use crate::lattice::{bracket, power_tail_bound, MultiIndex, TruncationWindow};
use crate::scalar::{cabs, czero, unit_phase, FftReal, Cx, Real};

/// `k` with the nonzero `(l, σ̂(l,k))`.
type Column<T> = (MultiIndex, Vec<(MultiIndex, Cx<T>)>);

/// `A[j,k] = σ̂(j−k, k)` for `j, k ∈ w`, with a tail model for the rest.
///
/// The tail is exact when the symbol vanishes beyond the window. Otherwise a
/// symbol of order `m < −n` gets an estimated power-law tail
/// `C · Σ_{|k|∞ > N−band} ⟨k⟩^m` with `C` the largest observed ratio of column
/// mass to `⟨k⟩^m`; any other symbol is marked not summable.
pub fn symbol_to_matrix<T: FftReal>(
    sigma: &ToroidalSymbol<T>,
    w: TruncationWindow,
) -> Result<(SparseL1Matrix<T>, TailModel<T>)> {
    if w.dim != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), found: w.dim });
    }
    let columns: Vec<Column<T>> = w
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| sigma.coefficient_column(&k).map(|c| (k, c.into_iter().collect())))
        .collect::<Result<_>>()?;

    let entries = columns.iter().flat_map(|(k, col)| {
        col.iter().filter_map(move |(l, v)| {
            let j = k + l;
            w.contains(&j).then(|| (j, k.clone(), *v))
        })
    });
    let a = SparseL1Matrix::from_entries(w.dim, entries)?;
    let tail = symbol_tail(sigma, w, &columns);
    Ok((a, tail))
}

fn symbol_tail<T: Real>(
    sigma: &ToroidalSymbol<T>,
    w: TruncationWindow,
    columns: &[Column<T>],
) -> TailModel<T> {
    let band = sigma.band();
    if sigma.k_support().is_some_and(|s| s + band <= w.radius) {
        return TailModel::exact();
    }
    let n = T::from_usize_lossy(w.dim);
    let Some(m) = sigma.order() else {
        return TailModel::not_summable("symbol has no order metadata; its matrix tail cannot be bounded");
    };
    if !(m < -n) {
        return TailModel::not_summable(format!(
            "symbol order {m} is not below -n = -{}; the matrix has infinite l1 mass",
            w.dim
        ));
    }
    let c = columns.iter().fold(T::zero(), |acc, (k, col)| {
        let mass = col.iter().fold(T::zero(), |s, (_, v)| s + cabs(*v));
        acc.max(mass / bracket::<T>(k).powf(m))
    });
    let dim = w.dim;
    let band = band as i64;
    let tail = TailModel::estimated(move |r| c * power_tail_bound(dim, -m, r as i64 - band))
        .with_complete_radius(w.radius)
        .with_decay_exponent(-(m + n))
        .with_note(format!("estimated from order {m} with constant {c}"));
    if band == 0 {
        tail.with_coupling(|_| T::zero())
    } else {
        tail
    }
}

/// `σ(x, k) = Σ_j A[j,k] e^{2πix·(j−k)}`.
pub fn matrix_to_symbol<T: Real>(a: &SparseL1Matrix<T>, x: &[T], k: &MultiIndex) -> Cx<T> {
    a.column(k).fold(czero(), |acc, (j, v)| acc + v * unit_phase((j - k).dot(x)))
}

/// `Γ(A) f = 𝓕⁻¹ A 𝓕 f` on the grid of `f`.
pub fn gamma_apply<T: FftReal>(a: &SparseL1Matrix<T>, f: &GridFunction<T>) -> Result<GridFunction<T>> {
    if a.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: a.dim() });
    }
    let radius = f.resolved_radius();
    let coeffs = f.fourier_coeffs(TruncationWindow::new(f.dim(), radius))?;
    let y = a.apply(&coeffs);
    if let Some(r) = y.keys().map(MultiIndex::max_norm).max().filter(|&r| r > radius) {
        return Err(Error::Aliasing { grid: f.size(), radius: r });
    }
    GridFunction::from_coeffs(f.dim(), f.size(), &y)
}

/// `Det_Γ(I + T) := Det(I + A)` with `A` the matrix of `σ`.
///
/// The matrix is built on the window `max_radius + band` so the last ladder
/// rung keeps all of its coupling entries.
pub fn det_gamma<T: FftReal>(sigma: &ToroidalSymbol<T>, opts: &DeterminantOptions<T>) -> Result<DeterminantResult<T>> {
    let w = TruncationWindow::new(sigma.dim(), opts.max_radius + sigma.band());
    let (a, tail) = symbol_to_matrix(sigma, w)?;
    poincare_determinant(&a, &tail, opts)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::l1_algebra::TailKind;
    use crate::scalar::cx;

    fn shift() -> ToroidalSymbol<f64> {
        let q: BTreeMap<_, _> = [(MultiIndex::new(vec![1]), cx(1.0, 0.0))].into_iter().collect();
        ToroidalSymbol::multiplication(1, q).unwrap()
    }

    #[test]
    fn multiplier_is_diagonal() {
        let s = ToroidalSymbol::<f64>::multiplier(1, |k| cx(k.coords()[0] as f64 + 0.5, 0.0));
        let (a, _) = symbol_to_matrix(&s, TruncationWindow::new(1, 3)).unwrap();
        assert_eq!(a.nnz(), 7);
        assert!(a.entries().all(|(j, k, v)| j == k && v == cx(k.coords()[0] as f64 + 0.5, 0.0)));
    }

    #[test]
    fn multiplication_is_toeplitz() {
        let (a, tail) = symbol_to_matrix(&shift(), TruncationWindow::new(1, 3)).unwrap();
        assert!(a.entries().all(|(j, k, v)| j.coords()[0] - k.coords()[0] == 1 && v == cx(1.0, 0.0)));
        assert_eq!(tail.kind(), TailKind::NotSummable);
        let q: BTreeMap<_, _> =
            [(MultiIndex::new(vec![1]), cx(1.0, 0.0)), (MultiIndex::new(vec![-1]), cx(1.0, 0.0))].into_iter().collect();
        let (c, _) = symbol_to_matrix(&ToroidalSymbol::multiplication(1, q).unwrap(), TruncationWindow::new(1, 4)).unwrap();
        assert!(c.entries().all(|(j, k, v)| (j.coords()[0] - k.coords()[0]).abs() == 1 && v == cx(1.0, 0.0)));
        assert_eq!(c.nnz(), 16);
    }

    #[test]
    fn recovery_of_shift_and_multiplier() {
        let (a, _) = symbol_to_matrix(&shift(), TruncationWindow::new(1, 3)).unwrap();
        let v = matrix_to_symbol(&a, &[0.3], &MultiIndex::new(vec![0]));
        assert!((v - unit_phase(0.3)).norm() < 1e-15);
        let d = SparseL1Matrix::diagonal(1, [(MultiIndex::new(vec![2]), cx(7.0, -1.0))]).unwrap();
        assert_eq!(matrix_to_symbol(&d, &[0.9], &MultiIndex::new(vec![2])), cx(7.0, -1.0));
    }

    #[test]
    fn laplacian_on_exponential() {
        let lap = ToroidalSymbol::<f64>::multiplier(1, |k| cx(4.0 * std::f64::consts::PI.powi(2) * k.norm_sq() as f64, 0.0));
        let (a, _) = symbol_to_matrix(&lap, TruncationWindow::new(1, 3)).unwrap();
        let f = GridFunction::from_fn(1, 8, |x| unit_phase(x[0]));
        let g = gamma_apply(&a, &f).unwrap();
        let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
        for (u, v) in f.samples().iter().zip(g.samples()) {
            assert!((v - u * four_pi2).norm() < 1e-12);
        }
        let z = gamma_apply(&SparseL1Matrix::zero(1), &f).unwrap();
        assert!(z.samples().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gamma_refuses_output_aliasing() {
        let (a, _) = symbol_to_matrix(&shift(), TruncationWindow::new(1, 4)).unwrap();
        let f = GridFunction::from_fn(1, 8, |x| unit_phase(3.0 * x[0]));
        assert!(matches!(gamma_apply(&a, &f), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn constant_multiplication_is_not_l1() {
        let q: BTreeMap<_, _> = [(MultiIndex::new(vec![0]), cx(3.0, 0.0))].into_iter().collect();
        let s = ToroidalSymbol::<f64>::multiplication(1, q).unwrap();
        assert!(matches!(det_gamma(&s, &DeterminantOptions::default()), Err(Error::NotL1(_))));
    }

    #[test]
    fn zero_symbol_determinant() {
        let s = ToroidalSymbol::<f64>::multiplier_values(1, BTreeMap::new()).unwrap();
        let r = det_gamma(&s, &DeterminantOptions::default()).unwrap();
        assert_eq!(r.value, cx(1.0, 0.0));
    }
}

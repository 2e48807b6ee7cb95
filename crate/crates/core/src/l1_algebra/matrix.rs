use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::lattice::{MultiIndex, TruncationWindow};
use crate::scalar::{cabs, czero, is_czero, Cx, Real};

/// A finitely supported sequence ℤⁿ → ℂ.
pub type LatticeVector<T> = BTreeMap<MultiIndex, Cx<T>>;

/// `(Σ |x_k|^p)^{1/p}`.
pub fn lp_norm<T: Real>(x: &LatticeVector<T>, p: T) -> T {
    assert!(p >= T::one(), "p must be at least 1");
    x.values().fold(T::zero(), |acc, v| acc + cabs(*v).powf(p)).powf(T::one() / p)
}

fn sorted_magnitude_sum<'a, T: Real>(values: impl Iterator<Item = &'a Cx<T>>) -> T {
    let mut mags: Vec<T> = values.map(|v| cabs(*v)).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    mags.into_iter().fold(T::zero(), |acc, m| acc + m)
}

/// Finitely supported complex matrix over ℤⁿ × ℤⁿ.
///
/// Entries are keyed `(row, col)` with row = output index, so that
/// `(A x)_j = Σ_k A[j,k] x_k`. No stored entry is exactly zero. The ℓ¹ norm is
/// summed over the sorted entry magnitudes at construction and cached, so it
/// does not depend on index order (transposes have bit-identical norms).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseL1Matrix<T: Real> {
    dim: usize,
    entries: BTreeMap<(MultiIndex, MultiIndex), Cx<T>>,
    norm: T,
}

impl<T: Real> SparseL1Matrix<T> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1);
        SparseL1Matrix { dim, entries: BTreeMap::new(), norm: T::zero() }
    }

    /// Builds a matrix from `(row, col, value)` triples; repeated positions are
    /// summed and exact zeros dropped.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, MultiIndex, Cx<T>)>,
    {
        let mut map: BTreeMap<(MultiIndex, MultiIndex), Cx<T>> = BTreeMap::new();
        for (r, c, v) in entries {
            for idx in [&r, &c] {
                if idx.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, found: idx.dim() });
                }
            }
            *map.entry((r, c)).or_insert_with(czero) += v;
        }
        Ok(Self::from_map(dim, map))
    }

    fn from_map(dim: usize, mut entries: BTreeMap<(MultiIndex, MultiIndex), Cx<T>>) -> Self {
        entries.retain(|_, v| !is_czero(*v));
        let norm = sorted_magnitude_sum(entries.values());
        SparseL1Matrix { dim, entries, norm }
    }

    pub fn identity_on(w: TruncationWindow) -> Self {
        let one = Cx::new(T::one(), T::zero());
        Self::from_map(w.dim, w.iter().map(|k| ((k.clone(), k), one)).collect())
    }

    pub fn diagonal<I>(dim: usize, diag: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Cx<T>)>,
    {
        Self::from_entries(dim, diag.into_iter().map(|(k, v)| (k.clone(), k, v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: &MultiIndex, col: &MultiIndex) -> Cx<T> {
        // BTreeMap lookup by tuple needs owned keys.
        self.entries.get(&(row.clone(), col.clone())).copied().unwrap_or_else(czero)
    }

    /// Entries in canonical `(row, col)` order.
    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, Cx<T>)> {
        self.entries.iter().map(|((r, c), v)| (r, c, *v))
    }

    /// `Σ |a_jk|`, cached.
    pub fn l1_norm(&self) -> T {
        self.norm
    }

    /// Re-sums the entry magnitudes; equals [`Self::l1_norm`] bit for bit.
    pub fn recompute_l1_norm(&self) -> T {
        sorted_magnitude_sum(self.entries.values())
    }

    /// Smallest `N` whose window contains every row and column index.
    pub fn support_radius(&self) -> Option<usize> {
        self.entries.keys().map(|(r, c)| r.max_norm().max(c.max_norm())).max()
    }

    pub fn transpose(&self) -> Self {
        let entries = self.entries.iter().map(|((r, c), v)| ((c.clone(), r.clone()), *v)).collect();
        Self::from_map(self.dim, entries)
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::from_map(self.dim, self.entries.iter().map(|(k, v)| (k.clone(), *v * s)).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut map = self.entries.clone();
        for (k, v) in &other.entries {
            *map.entry(k.clone()).or_insert_with(czero) += *v;
        }
        Ok(Self::from_map(self.dim, map))
    }

    /// `(AB)[j,l] = Σ_i A[j,i] B[i,l]`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let mut rows: HashMap<&MultiIndex, Vec<(&MultiIndex, Cx<T>)>> = HashMap::new();
        for ((r, c), v) in &other.entries {
            rows.entry(r).or_default().push((c, *v));
        }
        let mut out: BTreeMap<(MultiIndex, MultiIndex), Cx<T>> = BTreeMap::new();
        for ((j, i), a) in &self.entries {
            if let Some(row) = rows.get(i) {
                for (l, b) in row {
                    *out.entry((j.clone(), (*l).clone())).or_insert_with(czero) += *a * *b;
                }
            }
        }
        Ok(Self::from_map(self.dim, out))
    }

    /// `y_j = Σ_k A[j,k] x_k`. Satisfies `‖y‖_p ≤ ‖A‖₁ ‖x‖_p` for every `p ≥ 1`.
    pub fn apply(&self, x: &LatticeVector<T>) -> LatticeVector<T> {
        let mut y = LatticeVector::new();
        for ((j, k), a) in &self.entries {
            if let Some(xk) = x.get(k) {
                *y.entry(j.clone()).or_insert_with(czero) += *a * *xk;
            }
        }
        y.retain(|_, v| !is_czero(*v));
        y
    }

    /// Entries with both indices in `w`.
    pub fn restrict(&self, w: TruncationWindow) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|((r, c), _)| w.contains(r) && w.contains(c))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        Self::from_map(self.dim, entries)
    }

    /// Entries of column `k`.
    pub fn column(&self, k: &MultiIndex) -> impl Iterator<Item = (&MultiIndex, Cx<T>)> + '_ {
        let k = k.clone();
        self.entries.iter().filter(move |((_, c), _)| *c == k).map(|((r, _), v)| (r, *v))
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn e(r: i64, c: i64, v: Cx<f64>) -> (MultiIndex, MultiIndex, Cx<f64>) {
        ([r].into(), [c].into(), v)
    }

    #[test]
    fn norms() {
        assert_eq!(SparseL1Matrix::<f64>::zero(1).l1_norm(), 0.0);
        let a = SparseL1Matrix::from_entries(2, [([0, 0].into(), [0, 0].into(), cx(3.0, 4.0))]).unwrap();
        assert_eq!(a.l1_norm(), 5.0);
        let b = SparseL1Matrix::from_entries(
            2,
            [
                ([0, 0].into(), [0, 0].into(), cx(1.0, 0.0)),
                ([1, -1].into(), [0, 0].into(), cx(-2.0, 0.0)),
                ([-1, 2].into(), [0, 0].into(), cx(0.0, 1.0)),
            ],
        )
        .unwrap();
        assert_eq!(b.l1_norm(), 4.0);
        assert_eq!(b.l1_norm(), b.recompute_l1_norm());
    }

    #[test]
    fn zeros_are_dropped_and_duplicates_summed() {
        let a = SparseL1Matrix::from_entries(1, [e(0, 0, cx(1.0, 0.0)), e(0, 0, cx(-1.0, 0.0)), e(1, 1, cx(0.0, 0.0))])
            .unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn dimension_checks() {
        let bad = SparseL1Matrix::<f64>::from_entries(2, [e(0, 0, cx(1.0, 0.0))]);
        assert_eq!(bad, Err(Error::DimensionMismatch { expected: 2, found: 1 }));
        let a = SparseL1Matrix::<f64>::zero(1);
        let b = SparseL1Matrix::<f64>::zero(2);
        assert!(a.compose(&b).is_err());
    }

    #[test]
    fn transpose_examples() {
        let d = SparseL1Matrix::diagonal(1, [([0].into(), cx(2.0, 0.0)), ([3].into(), cx(-1.0, 1.0))]).unwrap();
        assert_eq!(d.transpose(), d);
        let a = SparseL1Matrix::from_entries(1, [e(0, 1, cx(2.0, 0.0))]).unwrap();
        assert_eq!(a.transpose(), SparseL1Matrix::from_entries(1, [e(1, 0, cx(2.0, 0.0))]).unwrap());
    }

    #[test]
    fn compose_examples() {
        let one = cx(1.0, 0.0);
        let ejk = SparseL1Matrix::from_entries(1, [e(2, 5, one)]).unwrap();
        let ekl = SparseL1Matrix::from_entries(1, [e(5, -1, one)]).unwrap();
        assert_eq!(ejk.compose(&ekl).unwrap(), SparseL1Matrix::from_entries(1, [e(2, -1, one)]).unwrap());
        let da = SparseL1Matrix::diagonal(1, [([0].into(), cx(2.0, 0.0)), ([1].into(), cx(3.0, 0.0))]).unwrap();
        let db = SparseL1Matrix::diagonal(1, [([1].into(), cx(0.0, 1.0)), ([2].into(), cx(5.0, 0.0))]).unwrap();
        assert_eq!(
            da.compose(&db).unwrap(),
            SparseL1Matrix::diagonal(1, [([1].into(), cx(0.0, 3.0))]).unwrap()
        );
    }

    #[test]
    fn apply_examples() {
        let w = TruncationWindow::new(2, 2);
        let id = SparseL1Matrix::<f64>::identity_on(w);
        let x: LatticeVector<f64> = [([1, -2].into(), cx(0.5, 1.0)), ([0, 0].into(), cx(-3.0, 0.0))].into_iter().collect();
        assert_eq!(id.apply(&x), x);
        let a = SparseL1Matrix::from_entries(1, [e(1, 0, cx(2.0, 0.0))]).unwrap();
        let delta0: LatticeVector<f64> = [([0].into(), cx(1.0, 0.0))].into_iter().collect();
        let y = a.apply(&delta0);
        assert_eq!(y, [([1].into(), cx(2.0, 0.0))].into_iter().collect());
    }

    #[test]
    fn lp_norms() {
        let x: LatticeVector<f64> = [([0].into(), cx(3.0, 0.0)), ([1].into(), cx(0.0, 4.0))].into_iter().collect();
        assert_eq!(lp_norm(&x, 1.0), 7.0);
        assert!((lp_norm(&x, 2.0) - 5.0).abs() < 1e-15);
    }
}

use nalgebra::DMatrix;

use super::{SparseL1Matrix, TailModel};
use crate::lattice::TruncationWindow;
use crate::scalar::{cabs, czero, Cx, Real};

/// Dense restriction of a matrix to a window, indexed in
/// [`enumerate_window`](crate::lattice::enumerate_window) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSection<T: Real> {
    window: TruncationWindow,
    matrix: DMatrix<Cx<T>>,
}

impl<T: Real> FiniteSection<T> {
    pub fn new(window: TruncationWindow, matrix: DMatrix<Cx<T>>) -> Self {
        let m = window.cardinality();
        assert!(matrix.nrows() == m && matrix.ncols() == m, "section must be {m}x{m}");
        FiniteSection { window, matrix }
    }

    pub fn zeros(window: TruncationWindow) -> Self {
        let m = window.cardinality();
        FiniteSection { window, matrix: DMatrix::from_element(m, m, czero()) }
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Cx<T>> {
        self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// Entrywise ℓ¹ sum.
    pub fn l1_norm(&self) -> T {
        self.matrix.iter().fold(T::zero(), |acc, v| acc + cabs(*v))
    }

    /// `I + F`.
    pub fn shifted_identity(&self) -> DMatrix<Cx<T>> {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)].re += T::one();
        }
        m
    }

    /// Sparse form of the section (zeros dropped).
    pub fn to_sparse(&self) -> SparseL1Matrix<T> {
        let pts: Vec<_> = self.window.iter().collect();
        let n = self.size();
        SparseL1Matrix::from_entries(
            self.window.dim,
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
                (pts[i].clone(), pts[j].clone(), self.matrix[(i, j)])
            }),
        )
        .expect("window dimension matches")
    }
}

/// Section plus the ℓ¹ mass left outside it.
#[derive(Debug, Clone)]
pub struct Truncation<T: Real> {
    pub section: FiniteSection<T>,
    /// Stored mass discarded plus the tail-model bound; dominates `‖A − F‖₁`.
    pub tail_norm: T,
    /// Part of `tail_norm` linking the window to its complement.
    pub coupling_norm: T,
    /// Stored mass discarded (exact).
    pub stored_tail: T,
    /// Stored diagonal mass discarded (exact).
    pub stored_diagonal_tail: T,
}

/// Radius at which the tail model is queried: windows beyond the stored
/// support gain no entries, so without an explicit complete radius the
/// support radius caps the query.
pub(crate) fn tail_query_radius<T: Real>(a: &SparseL1Matrix<T>, tail: &TailModel<T>, radius: usize) -> usize {
    match tail.complete_radius() {
        Some(_) => radius,
        None => a.support_radius().map_or(0, |s| radius.min(s)),
    }
}

/// Restricts `a` to `w × w`.
pub fn truncate<T: Real>(a: &SparseL1Matrix<T>, tail: &TailModel<T>, w: TruncationWindow) -> Truncation<T> {
    assert_eq!(a.dim(), w.dim, "window dimension must match the matrix");
    let mut section = FiniteSection::zeros(w);
    let mut stored_tail = T::zero();
    let mut stored_coupling = T::zero();
    let mut stored_diagonal_tail = T::zero();
    for (r, c, v) in a.entries() {
        match (w.position(r), w.position(c)) {
            (Some(i), Some(j)) => section.matrix[(i, j)] = v,
            (ri, ci) => {
                stored_tail += cabs(v);
                if ri.is_some() || ci.is_some() {
                    stored_coupling += cabs(v);
                }
                if r == c {
                    stored_diagonal_tail += cabs(v);
                }
            }
        }
    }
    let n = tail_query_radius(a, tail, w.radius);
    Truncation {
        section,
        tail_norm: stored_tail + tail.unstored_mass(n),
        coupling_norm: stored_coupling + tail.unstored_coupling(n),
        stored_tail,
        stored_diagonal_tail,
    }
}

/// `Tr F`, the diagonal sum.
pub fn finite_trace<T: Real>(f: &FiniteSection<T>) -> Cx<T> {
    f.matrix.diagonal().iter().fold(czero(), |acc, v| acc + *v)
}

/// `Det(I + F)` by partially pivoted LU.
pub fn finite_determinant<T: Real>(f: &FiniteSection<T>) -> Cx<T> {
    f.shifted_identity().lu().determinant()
}

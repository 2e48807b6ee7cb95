//! The algebra ℓ¹(ℤⁿ×ℤⁿ): sparse matrices with their ℓ¹ norm, finite sections,
//! and the trace and determinant extended by truncation.
//!
//! Convention: rows are output indices, `(Ax)_j = Σ_k A[j,k] x_k`. Norms and
//! finite-section spectra are invariant under transposition, so results stated
//! in the transposed convention carry over unchanged.

mod ladder;
mod matrix;
mod section;
mod tail;

pub use ladder::{
    classify, determinant_at_radius, determinant_ladder, invertibility_test, ladder_radii, poincare_determinant, poincare_trace,
    trace_ladder, DeterminantOptions, DeterminantResult, Invertibility, LadderRung, TraceResult,
};
pub use matrix::{lp_norm, LatticeVector, SparseL1Matrix};
pub use section::{finite_determinant, finite_trace, truncate, FiniteSection, Truncation};
pub use tail::{TailKind, TailModel};

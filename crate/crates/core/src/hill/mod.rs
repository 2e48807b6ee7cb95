//! Hill's determinant method for `(−Δ)^{ν/2} u + Q u = 0` on `𝕋ⁿ`.
//!
//! The damped matrix `A[k,m] = g_{k−m} / ((2π)^ν|k|^ν + 1)` is built as
//! stated ([`build_hill_matrix`], [`hill_determinant`]). Dividing the
//! coefficient equations by `(2π)^ν|k|^ν + 1` actually yields `I + Ã` with `Ã`
//! built from `g − δ₀`; the decision, extraction and scan routines use that
//! form so that their zeros are the solutions of the equation itself.

mod problem;
mod solve;

pub use problem::{build_hill_matrix, HillProblem};
pub use solve::{
    equation_determinant, existence_test, extract_null_solution, hill_determinant, hill_ladder, spectral_shift_scan, Existence,
    ExistenceReport, RootKind, ScanRoot, SolutionCandidate, SpectralScan,
};

//! Poincaré traces and determinants of ℓ¹ infinite matrices on ℤⁿ.
//!
//! The crate is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`); the `*F64` / `*F32` aliases fix it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extrapolate;
pub mod hill;
pub mod l1_algebra;
pub mod lattice;
pub mod scalar;
pub mod toroidal;

pub use error::{Error, Result};
pub use l1_algebra::{
    DeterminantOptions, DeterminantResult, FiniteSection, Invertibility, LadderRung, SparseL1Matrix, TailKind,
    TailModel, TraceResult,
};
pub use hill::{Existence, HillProblem, SolutionCandidate, SpectralScan};
pub use lattice::{MultiIndex, TruncationWindow};
pub use scalar::{Cx, FftReal, Real};
pub use toroidal::{GridFunction, ToroidalSymbol};

pub type SparseL1MatrixF64 = SparseL1Matrix<f64>;
pub type SparseL1MatrixF32 = SparseL1Matrix<f32>;
pub type TailModelF64 = TailModel<f64>;
pub type DeterminantResultF64 = DeterminantResult<f64>;
pub type DeterminantResultF32 = DeterminantResult<f32>;
pub type DeterminantOptionsF64 = DeterminantOptions<f64>;
pub type ToroidalSymbolF64 = ToroidalSymbol<f64>;
pub type GridFunctionF64 = GridFunction<f64>;
pub type HillProblemF64 = HillProblem<f64>;
pub type SpectralScanF64 = SpectralScan<f64>;

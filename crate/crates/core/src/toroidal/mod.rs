//! Toroidal symbols on `𝕋ⁿ × ℤⁿ`, Fourier analysis on the torus, and the
//! correspondence `A[j,k] = σ̂(j−k, k)` between symbols and ℓ¹ matrices.
//!
//! Fourier convention: `f̂(k) = ∫ e^{−2πix·k} f(x) dx` on the unit-volume
//! torus; grids are uniform with `M` points per axis and resolve coefficient
//! radius `N` only when `M > 2N`.

mod diagnostics;
mod grid;
mod matrix;
mod symbol;

pub use diagnostics::{
    fractional_laplacian_symbol, l1_membership_check, sobolev_norm, strong_ellipticity_check,
    symbol_order_diagnostic, AlphaFit, EllipticityReport, L1Membership, OrderReport, Witness,
};
pub use grid::GridFunction;
pub use matrix::{det_gamma, gamma_apply, matrix_to_symbol, symbol_to_matrix};
pub use symbol::{IndexRule, Representation, SampledRule, TableRule, ToroidalSymbol};

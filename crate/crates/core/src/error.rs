use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Payloads carry `f64` diagnostics regardless of the scalar type used for the
/// computation so that the error type stays non-generic.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("difference order has a negative entry: {0:?}")]
    InvalidOrder(Vec<i64>),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "no certified convergence by radius {radius}: value {value_re:e}{value_im:+e}i, certified error {certified_error:e} > tol {tol:e}"
    )]
    NotConverged {
        radius: usize,
        value_re: f64,
        value_im: f64,
        certified_error: f64,
        tol: f64,
        /// `(radius, re, im)` for every evaluated window.
        ladder: Vec<(usize, f64, f64)>,
    },

    #[error("grid of size {grid} cannot resolve coefficient radius {radius} without aliasing (need grid > 2*radius)")]
    Aliasing { grid: usize, radius: usize },

    #[error("symbol representation cannot produce Fourier coefficient rows: {0}")]
    UnsupportedRepresentation(String),

    #[error("operator matrix is not in l1: {0}")]
    NotL1(String),

    #[error("nu must exceed dimension (nu = {nu}, n = {dim})")]
    InfeasibleOrder { nu: f64, dim: usize },

    #[error("no null solution: smallest singular value {sigma:e} exceeds threshold {threshold:e}")]
    NoNullSolution { sigma: f64, threshold: f64 },

    #[error("empty lambda grid")]
    EmptyGrid,

    #[error("window too small for order fitting: {shells} shells, need at least 4")]
    FitWindowTooSmall { shells: usize },
}

pub type Result<V, E = Error> = std::result::Result<V, E>;

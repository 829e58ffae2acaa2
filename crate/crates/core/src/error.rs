//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors reported by spectral constructions and rate computations.
///
/// Quantities that are legitimately infinite (e.g. a Paley-Wiener integral of
/// a mask with a zero band) are returned as `f64::NEG_INFINITY` values, not as
/// errors; the variants below all indicate invalid inputs or genuinely
/// ill-posed evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A grid length does not satisfy a required divisibility constraint.
    #[error("grid size {n} is not divisible by {divisor} (required {context})")]
    Divisibility {
        n: usize,
        divisor: usize,
        context: &'static str,
    },

    /// A scalar argument is outside its documented range.
    #[error("argument {name} = {value} outside valid range: {requirement}")]
    Range {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Two sequences that must have equal lengths do not.
    #[error("length mismatch: {left_name} has {left}, {right_name} has {right}")]
    LengthMismatch {
        left_name: &'static str,
        left: usize,
        right_name: &'static str,
        right: usize,
    },

    /// Two spectral objects live on different frequency grids.
    #[error("grid mismatch: operands sampled on {left}-point and {right}-point grids")]
    GridMismatch { left: usize, right: usize },

    /// A power spectral density sample is negative beyond the clamp tolerance.
    #[error("negative PSD value {value:e} at bin {bin} (below the -1e-12 relative clamp)")]
    NegativePsd { bin: usize, value: f64 },

    /// A cross spectrum violates |S_wz|^2 <= S_w * S_z at some bin.
    #[error("Cauchy-Schwarz violation at bin {bin}: |cross|^2 = {cross_sq:e} > {bound:e}")]
    CauchySchwarz {
        bin: usize,
        cross_sq: f64,
        bound: f64,
    },

    /// The noise alias sum vanishes on a positive-measure set of output bins.
    #[error("degenerate denominator: alias noise power vanishes at output bin {bin}")]
    DegenerateDenominator { bin: usize },

    /// The alias covariance matrix is singular on a positive-measure set.
    #[error("singular alias covariance matrix at output bin {bin}")]
    SingularMatrix { bin: usize },

    /// S_s * S_x - |S_sx|^2 <= 0 where a strictly positive value is required.
    #[error("regularity violation at bin {bin}: S_s*S_x - |S_sx|^2 = {value:e} with nonzero cross power")]
    RegularityViolation { bin: usize, value: f64 },

    /// A division by an exactly zero quantity that has no removable limit.
    #[error("division by zero at bin {bin} in {context}")]
    DivisionByZero { bin: usize, context: &'static str },

    /// An operation-specific precondition failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A covariance factorization failed even after diagonal regularization.
    #[error("ill-conditioned covariance: Cholesky failed after adding jitter {regularization:e}")]
    IllConditioned { regularization: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

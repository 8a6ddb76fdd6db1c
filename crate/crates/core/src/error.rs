//! Error types shared across the crate.
//!
//! Validation failures name the violated invariant so that callers (and the CLI,
//! which maps them to exit code 2) can report exactly what was wrong with an
//! input. Capacity errors (exit code 3) name the configured limit they hit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.6e} is below the clip tolerance {tolerance:.3e}")]
    NotPositiveSemidefinite { eigenvalue: f64, tolerance: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {eigenvalue:.6e} is below the floor {floor:.3e}")]
    NotPositiveDefinite { eigenvalue: f64, floor: f64 },

    #[error("trace is not 1: found {trace:.12} (tolerance {tolerance:.1e})")]
    NotUnitTrace { trace: f64, tolerance: f64 },

    #[error("channel is not trace preserving: ||sum_k K_k^dag K_k - I|| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotTracePreserving { deviation: f64, tolerance: f64 },

    #[error("classical channel is not row stochastic: {reason}")]
    NotRowStochastic { reason: String },

    #[error("dimension mismatch in {context}: {left} vs {right}")]
    DimensionMismatch {
        context: String,
        left: usize,
        right: usize,
    },

    #[error("capacity exceeded: {what} requires {requested} but the configured limit is {limit}")]
    Capacity {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "singular support: negative matrix power requested on a singular matrix in strict mode"
    )]
    SingularSupport,

    #[error("numerical limit did not converge: {what} (last values {values:?})")]
    NumericalLimit { what: String, values: Vec<f64> },

    #[error("invalid input: {0}")]
    Validation(String),
}

impl Error {
    pub fn dim_mismatch(context: &str, left: usize, right: usize) -> Self {
        Error::DimensionMismatch {
            context: context.to_string(),
            left,
            right,
        }
    }

    /// True for errors that should map to the CLI capacity exit code.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::Capacity { .. })
    }
}

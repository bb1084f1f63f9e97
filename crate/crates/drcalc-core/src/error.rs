//! Error type shared by all modules.
//!
//! The variants deliberately mirror the distinct failure modes surfaced by
//! the command-line tool: input validation, stabilization (interpolation)
//! failures, grading mismatches, and scan counterexamples.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error enum.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad graph, degree vector, flags...).
    #[error("validation error: {0}")]
    Validation(String),

    /// Interpolated values failed to stabilize to a polynomial of the
    /// expected degree: extra sample points disagree with the fit.
    #[error("stabilization failure: {0}")]
    Stabilization(String),

    /// A class was asked to integrate (or pair) at the wrong codimension.
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    /// A correlator/moduli request violates the stability condition
    /// 2g - 2 + n > 0.
    #[error("unstable moduli request: {0}")]
    Instability(String),

    /// Requested codimension exceeds the dimension of the moduli space.
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    /// An exhaustive scan found a violation of an asserted inequality.
    #[error("counterexample found: {0}")]
    Counterexample(String),

    /// Underlying I/O failure (cache files, configs).
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

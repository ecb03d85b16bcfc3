//! Crate-wide error type.

use std::fmt;

/// Errors produced by matrix construction, lifting, and bound computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Matrix dimensions are incompatible for the operation.
    DimensionMismatch { expected: String, got: String },
    /// A matrix entry is NaN or infinite.
    NonFinite,
    /// Data length does not match the declared shape.
    InvalidData { expected: usize, got: usize },
    /// Input matrix is not symmetric within tolerance.
    NotSymmetric { asymmetry: f64 },
    /// A matrix set must contain at least one matrix.
    EmptySet,
    /// Weight vector fails validation.
    BadWeights(String),
    /// The request exceeds a configured capacity limit.
    Capacity { what: String, limit: String },
    /// The summed upper bound is only valid for matrices that leave a common
    /// proper cone invariant; entrywise nonnegativity is the one case checked
    /// automatically, anything else must be asserted by the caller.
    HypothesisUnmet,
    /// Iterative eigenvalue estimation did not converge.
    NotConverged { iterations: usize },
    /// No valid ellipsoid certificate could be produced.
    CertificateFailure(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFinite => write!(f, "matrix entries must be finite (no NaN or infinity)"),
            Error::InvalidData { expected, got } => {
                write!(f, "data length mismatch: expected {expected} values, got {got}")
            }
            Error::NotSymmetric { asymmetry } => {
                write!(f, "matrix is not symmetric (max relative asymmetry {asymmetry:e})")
            }
            Error::EmptySet => write!(f, "matrix set must contain at least one matrix"),
            Error::BadWeights(reason) => write!(f, "invalid weights: {reason}"),
            Error::Capacity { what, limit } => {
                write!(f, "capacity exceeded: {what} is beyond the limit {limit}")
            }
            Error::HypothesisUnmet => write!(
                f,
                "matrices are not entrywise nonnegative and no common invariant cone was \
                 asserted; the summed upper bound is only valid under that hypothesis \
                 (use a lift-based method instead, or assert the cone)"
            ),
            Error::NotConverged { iterations } => {
                write!(f, "power iteration did not converge after {iterations} iterations")
            }
            Error::CertificateFailure(reason) => {
                write!(f, "ellipsoid certificate construction failed: {reason}")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

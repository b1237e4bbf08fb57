//! Crate-wide error type.
//!
//! Each variant corresponds to one class of rejected input or one reported
//! degeneracy, so callers (and the command-line tool) can map errors to
//! distinct codes without string matching.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty vector has no content")]
    EmptyVector,

    #[error("zero vector is not a direction")]
    ZeroVector,

    #[error("vector {0} is not primitive (content {1})")]
    NotPrimitive(String, String),

    #[error("matrix is not square")]
    NotSquare,

    #[error("matrix has determinant {0}, not +/-1")]
    NotUnimodular(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("zero denominator with zero numerator is not a rational")]
    ZeroOverZero,

    #[error("continued fraction term {0} is zero at position {1} (only the leading term may vanish)")]
    ZeroCfTerm(String, usize),

    #[error("no expansion of length <= {max_len} with terms bounded by {bound}: bound too small")]
    BoundTooSmall { bound: String, max_len: usize },

    #[error("exhaustive search budget exceeded; lower the term bound or use the nearest-integer expansion")]
    SearchBudgetExceeded,

    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("duplicate placement: {0}")]
    DuplicatePlacement(String),

    #[error("{what} {value} outside {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("configuration is not known to be hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("continued fraction {cf} evaluates to {value}, but rod {rod} requires {expected}")]
    CfRodMismatch {
        cf: String,
        value: String,
        rod: String,
        expected: String,
    },

    #[error("bound inapplicable: {0}")]
    Inapplicable(String),

    #[error("meridional filling slope present: the slope-length gate does not apply")]
    MeridionalSlope,

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

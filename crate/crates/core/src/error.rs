//! Error taxonomy shared by every module.

use thiserror::Error;

/// Everything that can go wrong outside of plain arithmetic.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("not divisible")]
    NotDivisible,
    #[error("expected a polynomial of positive degree")]
    NotAPolynomialOfPositiveDegree,
    #[error("laurent polynomial with negative exponents cannot be used here")]
    NegativeExponent,
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("degree {found} below threshold {need}")]
    BelowThreshold { need: String, found: String },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("unsupported degree pattern: {0}")]
    UnsupportedDegreePattern(String),
    #[error("family member does not match either theorem shape: {0}")]
    ShapeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

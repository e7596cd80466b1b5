//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KError {
    /// An operator that must preserve polynomial coefficients was applied to
    /// an input outside its domain.
    #[error("polynomial division is not exact")]
    NotDivisible,

    #[error("division by zero")]
    DivisionByZero,

    #[error("series constant term is not a unit")]
    NonUnitConstantTerm,

    #[error("computation exceeds the configured budget")]
    BudgetExceeded,

    #[error("enumeration exceeds the configured bound")]
    BoundExceeded,

    #[error("partition is not k-bounded for this rank")]
    NotKBounded,

    #[error("partition is not k-small")]
    NotKSmall,

    #[error("word is not reduced")]
    NotReduced,

    #[error("word does not define an affine Grassmannian element")]
    NotGrassmannian,

    #[error("triangular system degenerated during fraction reduction")]
    SingularSystem,

    #[error("discrete Toda step hit a degenerate point: {0}")]
    DegeneratePoint(String),

    #[error("denominator degenerates under the substitution")]
    DegenerateDenominator,

    #[error("invalid input: {0}")]
    Invalid(String),
}

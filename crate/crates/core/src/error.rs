//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported underlying graph: {0}")]
    UnsupportedType(String),
    #[error("operation not available for this quiver case: {0}")]
    UnsupportedCase(String),
    #[error("orbit is outside the invariant family handled here: {0}")]
    PartialInvariants(String),
    #[error("no nonnegative integral decomposition matches the requested invariants: {0}")]
    Infeasible(String),
    #[error("dimension vectors do not match")]
    DimensionMismatch,
    #[error("monomial is infeasible against the dimension vector: {0}")]
    InfeasibleMonomial(String),
    #[error("invariants fall outside every resolution display's hypotheses: {0}")]
    NoResolutionRule(String),
    #[error("configuration is not crepant; the canonical-bundle formula is not asserted: {0}")]
    NotCrepant(String),
    #[error("torus weight collision; re-randomize framing weights")]
    WeightCollision,
    #[error("integrand degree does not match the variety dimension")]
    DegreeMismatch,
    #[error("localization produced a non-integer where an integer was required: {0}")]
    NonIntegerResult(String),
    #[error("bundle does not have rank 1")]
    RankError,
    #[error("expected dimension of the degeneracy locus is negative")]
    ExpectedDimensionNegative,
    #[error("matrix tuple does not lie in the orbit closure resolved by this spec")]
    PointNotInOrbit,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the exact algebra and enumeration routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("cokernel is infinite (determinant is zero)")]
    InfiniteCokernel,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mixed discriminants {0} and {1}")]
    MixedDiscriminant(u64, u64),
    #[error("discriminant {0} is not squarefree (or is 1)")]
    BadDiscriminant(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("polarization matrix is singular")]
    SingularPolarization,
    #[error("homomorphism diagram does not commute")]
    DiagramDoesNotCommute,
    #[error("homomorphism is not an isogeny")]
    NotIsogeny,
    #[error("unsupported rank {0} (expected 2 or 3)")]
    UnsupportedRank(usize),
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("enumeration budget exceeded: {candidates} candidates > budget {budget}")]
    BudgetExceeded { candidates: u128, budget: u128 },
    #[error("invalid abelian type: {0}")]
    InvalidType(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has genus zero")]
    GenusZero,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("slope on edge {0} is not primitive")]
    NonPrimitiveSlope(usize),
    #[error("graph too large for isomorphism search ({0} vertices)")]
    TooLarge(usize),
    #[error("condition violated: {0}")]
    ConditionViolated(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

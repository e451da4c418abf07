use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("insufficient jet order: need {needed}, have {have} ({context})")]
    InsufficientOrder { needed: u32, have: u32, context: String },
    #[error("base-point condition violated: {0}")]
    BasePoint(String),
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("not positive definite: {0}")]
    NotPositive(String),
    #[error("square root is not exactly representable: {0}")]
    IrrationalSqrt(String),
    #[error("regularity violated: {0}")]
    Regularity(String),
    #[error("Neumann series precondition failed: {0}")]
    Neumann(String),
    #[error("pipeline assertion failed: {0}")]
    Assertion(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    /// True for failures of an internal consistency check rather than bad input.
    pub fn is_assertion(&self) -> bool {
        matches!(self, Error::Assertion(_) | Error::Neumann(_) | Error::Regularity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

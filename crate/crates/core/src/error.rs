use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("scalar domain mismatch: {left} vs {right}")]
    DomainMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid scalar domain `{0}`: {1}")]
    InvalidDomain(String, String),

    #[error("cannot parse scalar `{0}` in domain {1}")]
    InvalidScalar(String, String),

    #[error("invalid algebra spec `{0}`: expected tn:<n> or mn:<n> with n >= 1")]
    InvalidAlgebraSpec(String),

    #[error("algebra size must be at least 1")]
    EmptyAlgebra,

    #[error("structure table is not associative at basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("unit law fails at basis element {0}")]
    UnitLawViolated(usize),

    #[error("algebra mismatch: {left} vs {right}")]
    AlgebraMismatch { left: String, right: String },

    #[error("expected {expected} coefficients, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("no basis element ({0},{1}) in {2}")]
    UnknownBasisLabel(usize, usize, String),

    #[error("invalid mode `{0}`: expected gh, jordan or jordan-corner")]
    InvalidMode(String),

    #[error("solution spaces use different layouts: {0}")]
    LayoutMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("dense elimination budget exceeded: {cols} columns > {limit}")]
    BudgetExceeded { cols: usize, limit: usize },

    #[error("malformed json: {0}")]
    Json(String),
}

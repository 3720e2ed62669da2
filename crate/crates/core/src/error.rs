use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parabolics are not adjacent: {0}")]
    NotAdjacent(String),
    #[error("root {0} is not in the wedge of the adjacent pair")]
    RootNotInWedge(String),
    #[error("negative exponent q^{exp} does not evaluate to an integer at q = {q}")]
    NegativeExponent { exp: i32, q: i64 },
    #[error("parameters outside the validity region: {0}")]
    OutOfValidityRegion(String),
    #[error("orthogonal family is not positive: {0}")]
    PositivityViolated(String),
    #[error("truncation polytope is not sufficiently regular: {0}")]
    NotSufficientlyRegular(String),
    #[error("truncation polytope is not regular: {0}")]
    NotRegular(String),
    #[error("perturbation is not generic: {0}")]
    GenericityFailure(String),
    #[error("lattice region is unbounded")]
    Unbounded,
    #[error("pipelines disagree: {0}")]
    InconsistentPipelines(String),
    #[error("unsupported group or case: {0}")]
    UnsupportedGroup(String),
    #[error("formula branch mismatch: {0}")]
    BranchMismatch(String),
    #[error("series precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("enumeration budget exceeded: estimated {estimate}, cap {cap}")]
    BudgetExceeded { estimate: u128, cap: u128 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

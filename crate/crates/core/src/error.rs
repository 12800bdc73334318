use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },

    #[error("size {requested} exceeds the cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("matroid axiom violated: {0}")]
    MatroidAxiom(String),

    #[error("matroid has {0} loop(s)")]
    Loops(usize),

    #[error("invalid flag: {0}")]
    InvalidFlag(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("direction {0} lies outside Q (pairs to {1} with a ray)")]
    OutsideQ(String, String),

    #[error("vector {0} is not generic for this fan")]
    NotGeneric(String),

    #[error("weight has no value at {0}")]
    MissingValue(String),

    #[error("weight domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("polytope input is not submodular: {0}")]
    NotSubmodular(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsgError {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("color {color} out of range 1..={k}")]
    ColorOutOfRange { color: usize, k: usize },

    #[error("point {0} has an empty color set")]
    EmptyColorSet(usize),

    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A solver declined an input that exceeds its configured search limit.
    #[error("refused: {what} is {actual}, limit is {limit}")]
    LimitExceeded {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid cnf: {0}")]
    InvalidCnf(String),

    #[error("assignment does not satisfy clause {0}")]
    Unsatisfied(usize),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for CsgError {
    fn from(e: serde_json::Error) -> Self {
        CsgError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CsgError>;

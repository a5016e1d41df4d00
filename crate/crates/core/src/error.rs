use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("limit exceeded: {what} needs {requested}, limit is {limit}")]
    LimitExceeded {
        what: String,
        requested: u128,
        limit: u128,
    },
    #[error("action is not transitive: {0}")]
    Intransitive(String),
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("window exceeded at vertex {0}")]
    WindowExceeded(String),
    #[error("vertex {w} is not below {v}")]
    NotBelow { v: String, w: String },
    #[error("not a neighbour: {0}")]
    NotNeighbour(String),
    #[error("element does not fix vertex {0}")]
    NotFixed(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("not a unit: {0}")]
    NotUnit(String),
    #[error("invalid transversal: {0}")]
    InvalidTransversal(String),
    #[error("unknown name: {0}")]
    Unknown(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("labelling violates condition {condition}: {detail}")]
    Labelling { condition: u8, detail: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn limit(what: impl Into<String>, requested: u128, limit: u128) -> Self {
        Error::LimitExceeded {
            what: what.into(),
            requested,
            limit,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

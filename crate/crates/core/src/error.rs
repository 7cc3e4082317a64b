use thiserror::Error;

/// Coarse error classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Schema,
    SizeLimit,
    Hypothesis,
    Other,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid probability {name} = {value}: {reason}")]
    InvalidProbability {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("configuration does not match the space alphabet or length: {0}")]
    AlphabetMismatch(String),
    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("operation needs a dense truth table, got an oracle-backed function")]
    OracleNotEnumerable,
    #[error("event is not increasing: {0}")]
    NotIncreasing(String),
    #[error("generator {generator} does not preserve the function at configuration {configuration:?}")]
    NotPreserved {
        generator: usize,
        configuration: Vec<i8>,
    },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("{0} is not a dyadic rational in (0,1)")]
    NotDyadic(String),
    #[error("degenerate function: Pr(f = 1) is 0 or 1")]
    Degenerate,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("empty seed set")]
    EmptySeedSet,
    #[error("grid does not divide the torus: {0}")]
    NonIntegralGrid(String),
    #[error("degenerate rectangle: {0}")]
    DegenerateRect(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn category(&self) -> Category {
        match self {
            Error::SizeLimit(_) | Error::OracleNotEnumerable => Category::SizeLimit,
            Error::Hypothesis(_) | Error::NotIncreasing(_) | Error::NotPreserved { .. } => {
                Category::Hypothesis
            }
            Error::InvalidProbability { .. }
            | Error::AlphabetMismatch(_)
            | Error::ArityMismatch { .. }
            | Error::OutOfRange(_)
            | Error::InvalidPermutation(_)
            | Error::NotDyadic(_)
            | Error::NonIntegralGrid(_)
            | Error::DegenerateRect(_)
            | Error::Parse(_) => Category::Schema,
            Error::Degenerate | Error::EmptyFamily | Error::EmptySeedSet => Category::Other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

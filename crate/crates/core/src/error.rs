use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A functional refers to a weight index the instance does not have.
    #[error("functional index {index} out of range for an instance of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight {index} is negative ({value}); weights must be nonnegative")]
    NegativeWeight { index: usize, value: String },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("instance size {n} exceeds the capacity limit {max} of this oracle")]
    Capacity { n: usize, max: usize },

    /// The recorded primary value disagrees with re-evaluation. This is an
    /// implementation bug in whatever produced the trace, not a policy issue.
    #[error("corrupt trace at step {step}: recorded value {recorded}, recomputed {recomputed}")]
    CorruptTrace {
        step: usize,
        recorded: String,
        recomputed: String,
    },

    #[error("tie at step {step} was not resolved consistently with the shadow direction")]
    PolicyMismatch { step: usize },

    #[error(
        "comparison at step {step} is constant in the shadow direction and cannot be resolved"
    )]
    UnresolvedTie { step: usize },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("no co-occurrence mass")]
    NoCooccurrenceMass,

    #[error("zero vector")]
    ZeroVector,

    #[error("undefined correlation")]
    UndefinedCorrelation,

    #[error("word not in vocabulary: {0:?}")]
    UnknownWord(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate seeds: {0}")]
    DegenerateSeeds(String),

    #[error("failed to converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("evaluation precondition failed: {0}")]
    Evaluation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

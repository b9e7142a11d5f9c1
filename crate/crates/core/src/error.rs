use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown problem `{name}`; available: {}", available.join(", "))]
    UnknownProblem { name: String, available: Vec<String> },

    #[error("unknown algorithm `{0}`; expected one of: aefa, ai-aefa")]
    UnknownAlgorithm(String),

    #[error("non-finite evaluation for agent {agent} at iteration {iteration}")]
    NonFiniteEvaluation { agent: usize, iteration: usize },

    #[error("run {run} of `{problem}` with {algorithm} failed: {source}")]
    RunFailed {
        problem: String,
        algorithm: String,
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("undefined result: {0}")]
    Undefined(&'static str),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("too many features for exact enumeration: {0} (limit {1})")]
    TooManyFeatures(usize, usize),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

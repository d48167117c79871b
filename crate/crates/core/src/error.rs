use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid intervention: {0}")]
    InvalidIntervention(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

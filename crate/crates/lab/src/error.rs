use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad command line, config key or parameter value.
    #[error("usage: {0}")]
    Usage(String),
    /// A precondition of an experiment failed on its input field.
    #[error("{experiment}: cell {cell} violates {what}")]
    Precondition { experiment: String, cell: usize, what: String },
    #[error(transparent)]
    Calculus(#[from] cone_calculus::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
}

pub type LabResult<T> = Result<T, LabError>;

pub fn usage<T>(msg: impl Into<String>) -> LabResult<T> {
    Err(LabError::Usage(msg.into()))
}

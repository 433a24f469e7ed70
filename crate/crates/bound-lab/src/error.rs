use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("spec error: {0}")]
    Spec(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] torus_fio::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl LabError {
    /// Process exit code: 2 for spec problems, 3 for numerical or output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Spec(_) => 2,
            _ => 3,
        }
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;

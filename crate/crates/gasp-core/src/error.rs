use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaspError {
    #[error("input error: {0}")]
    Input(String),
    #[error("topology error: {0}")]
    Topology(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl GaspError {
    /// Process exit code convention: 2 input, 3 topology/invariant, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            GaspError::Input(_) | GaspError::Io(_) => 2,
            GaspError::Topology(_) => 3,
            GaspError::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, GaspError>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("integration diverged: {0}")]
    Divergence(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("gate not found within horizon (best peak {best_peak})")]
    GateNotFound { best_peak: f64 },

    #[error("convergence estimate inconclusive: {0}")]
    Inconclusive(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code for the CLI: 2 I/O, 3 divergence, 4 gate not found,
    /// 64 usage, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            Error::Divergence(_) => 3,
            Error::GateNotFound { .. } => 4,
            Error::Usage(_) | Error::InvalidParameter(_) | Error::Config(_) => 64,
            _ => 1,
        }
    }
}

use std::process::ExitCode;

use singspec_core::Error as CoreError;

/// Failures surfaced by the runner, mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad configuration or input file; exit code 1.
    #[error("config: {0}")]
    Config(String),
    /// A numerical failure signal from the core; exit code 2.
    #[error("{0}")]
    Numerical(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl AppError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            // invalid potential data is an input problem, not a numerical one
            Self::Numerical(
                CoreError::InvalidGrid(_)
                | CoreError::SiteOutsideInterval { .. }
                | CoreError::SiteNotOnGrid(_)
                | CoreError::ScaleTooLarge { .. }
                | CoreError::Potential(_),
            ) => 1,
            Self::Numerical(_) => 2,
            Self::Config(_) | Self::Io(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;

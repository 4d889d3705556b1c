use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DIVERGED: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] rarita_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use rarita_core::Error as E;
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Failed(_) => EXIT_CHECK_FAILED,
            CliError::Core(e) => match e {
                E::InvalidConfig(_)
                | E::InvalidGeometry(_)
                | E::GeometryMismatch(_)
                | E::NegativeEpsilon(_) => EXIT_CONFIG,
                E::Io { .. } | E::Checkpoint { .. } => EXIT_IO,
                E::Diverged { .. } => EXIT_DIVERGED,
                _ => EXIT_CHECK_FAILED,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

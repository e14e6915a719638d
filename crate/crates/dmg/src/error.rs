use std::io;
use std::path::PathBuf;

/// Process exit codes. Scripts rely on these values.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const SINGULAR: u8 = 2;
    pub const IO: u8 = 3;
    pub const INVALID_CONFIG: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: line {line}: {msg}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Solver(#[from] dmg_core::Error),
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use dmg_core::Error as E;
        match self {
            CliError::Config(_) => exit::INVALID_CONFIG,
            CliError::Io { .. } | CliError::Format { .. } => exit::IO,
            CliError::CheckFailed(_) => exit::CHECK_FAILED,
            CliError::Solver(
                E::SingularMatrix { .. }
                | E::SingularCoarseMatrix { .. }
                | E::SingularSymbol { .. },
            ) => exit::SINGULAR,
            CliError::Solver(_) => exit::INVALID_CONFIG,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use stability_core::Error as CoreError;
use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// A user-supplied parameter is missing or malformed.
    #[error("config: {param}: {message}")]
    Config { param: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("io: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(param: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            param: param.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for size limits,
    /// 1 for everything else. Unconverged searches (4) are not errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::CONFIG,
            CliError::Core(e) if e.is_size() => exit::SIZE,
            CliError::Core(
                CoreError::Argument { .. }
                | CoreError::Format { .. }
                | CoreError::DomainMismatch { .. }
                | CoreError::InvalidWitness(_),
            ) => exit::CONFIG,
            _ => exit::OTHER,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SIZE: i32 = 3;
    pub const UNCONVERGED: i32 = 4;
}

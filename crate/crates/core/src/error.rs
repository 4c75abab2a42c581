use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library. Every variant names the module it came
/// from so harness messages can point at the failing component.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: invalid argument: {message}")]
    Argument {
        module: &'static str,
        message: String,
    },

    #[error("{module}: size limit exceeded: {message}{}", lower_bound.map(|b| format!(" (best lower bound so far: {b})")).unwrap_or_default())]
    Size {
        module: &'static str,
        message: String,
        lower_bound: Option<usize>,
    },

    #[error("{module}: domain mismatch: {message}")]
    DomainMismatch {
        module: &'static str,
        message: String,
    },

    #[error("learners: realizability violation: {0}")]
    Realizability(String),

    #[error("learners: empirical learner violation: {0}")]
    EmpiricalViolation(String),

    #[error("adversary: witness rejected: {0}")]
    InvalidWitness(String),

    #[error("adversary: learner violates empirical precondition: {0}")]
    Precondition(String),

    #[error("estimators: trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{module}: malformed input: {message}")]
    Format {
        module: &'static str,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn argument(module: &'static str, message: impl Into<String>) -> Self {
        Error::Argument {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn size(module: &'static str, message: impl Into<String>) -> Self {
        Error::Size {
            module,
            message: message.into(),
            lower_bound: None,
        }
    }

    pub(crate) fn domain(module: &'static str, message: impl Into<String>) -> Self {
        Error::DomainMismatch {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn format(module: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            module,
            message: message.into(),
        }
    }

    /// True for [`Error::Size`], including when wrapped by a trial index.
    pub fn is_size(&self) -> bool {
        match self {
            Error::Size { .. } => true,
            Error::Trial { source, .. } => source.is_size(),
            _ => false,
        }
    }
}

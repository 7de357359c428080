use std::fmt;

use thiserror::Error;

use crate::resource::FlowViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot parse {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("{what} on {requested} qubits exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),

    #[error("generator {0} is a product of earlier generators (up to sign)")]
    Dependent(usize),

    #[error("generator {0} has a non-Hermitian phase")]
    NonHermitian(usize),

    #[error("no flow: measured qubit {qubit} has no correction operator compatible with the order")]
    NoFlow { qubit: usize },

    #[error("flow check failed: {0}")]
    Flow(FlowViolation),

    #[error("invalid resource state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Process exit codes used by the command-line front end.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Validation = 2,
    Cap = 3,
    Io = 4,
}

impl fmt::Display for ExitCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as i32)
    }
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::CapExceeded { .. } => ExitCode::Cap,
            Error::Io(_) => ExitCode::Io,
            _ => ExitCode::Validation,
        }
    }

    pub(crate) fn cap(what: &'static str, requested: usize, cap: usize) -> Self {
        Error::CapExceeded {
            what,
            requested,
            cap,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

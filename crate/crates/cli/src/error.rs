use std::fmt;
use std::path::Path;

use bundlefair::Error;

/// Stable failure codes printed as `CODE: message` on stderr.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    Config,
    DatasetNotFound,
    DatasetInvalid,
    PredictionsNotFound,
    PredictionsInvalid,
    Eval,
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Config => "E_CONFIG",
            Code::DatasetNotFound => "E_DATASET_NOT_FOUND",
            Code::DatasetInvalid => "E_DATASET_INVALID",
            Code::PredictionsNotFound => "E_PREDICTIONS_NOT_FOUND",
            Code::PredictionsInvalid => "E_PREDICTIONS_INVALID",
            Code::Eval => "E_EVAL",
            Code::Io => "E_IO",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: Code,
    pub message: String,
}

impl CliError {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(Code::Io, format!("{}: {e}", path.display()))
    }

    pub fn dataset(e: Error) -> Self {
        let code = match e {
            Error::MissingFile(_) => Code::DatasetNotFound,
            Error::Io { .. } => Code::Io,
            _ => Code::DatasetInvalid,
        };
        Self::new(code, e.to_string())
    }

    pub fn predictions(e: Error) -> Self {
        let code = match e {
            Error::MissingFile(_) => Code::PredictionsNotFound,
            Error::Io { .. } => Code::Io,
            _ => Code::PredictionsInvalid,
        };
        Self::new(code, e.to_string())
    }

    pub fn eval(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => Code::Config,
            Error::Io { .. } => Code::Io,
            _ => Code::Eval,
        };
        Self::new(code, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep it on one line so scripts can split on the first colon
        let message = self.message.replace(['\n', '\r'], " ");
        write!(f, "{}: {}", self.code.as_str(), message.trim())
    }
}

pub type CliResult<T> = Result<T, CliError>;

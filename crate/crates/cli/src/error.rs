use liyorke_core::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("cli: invalid `{parameter}`: {reason}")]
    Config { parameter: String, reason: String },

    #[error("cli: cannot write output: {0}")]
    Output(String),

    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn config(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            parameter: parameter.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Output(_) => 1,
            CliError::Core(e) => match e {
                Error::RejectedInput { .. } | Error::DimensionMismatch { .. } => 1,
                Error::PrecisionExhausted { .. } => 2,
                Error::NumericalRange { .. } | Error::Overflow { .. } => 3,
            },
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

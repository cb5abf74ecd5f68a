use std::fmt;

use twostage_core::Error;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NOT_A_SPLITTING: u8 = 3;
pub const EXIT_SINGULAR_U: u8 = 4;
pub const EXIT_SINGULAR_TRANSITION: u8 = 5;
pub const EXIT_NO_CONVERGENCE: u8 = 6;
pub const EXIT_HYPOTHESIS: u8 = 7;

/// An error carrying the process exit status it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }

    /// Maps a library error; `singular` is the status used for a singular matrix in this context.
    pub fn from_core(err: Error, singular: u8) -> Self {
        let code = match &err {
            Error::Parse { .. } | Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::BadRelaxation(_) => {
                EXIT_PARSE
            }
            Error::NotASplitting { .. } | Error::MismatchedA => EXIT_NOT_A_SPLITTING,
            Error::SingularMatrix { .. } | Error::ZeroDiagonal { .. } => singular,
            Error::MaxIterations { .. } | Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
            Error::HypothesisFailed(_) | Error::NotMonotone | Error::HypothesisMismatch(_) => EXIT_HYPOTHESIS,
            _ => EXIT_FAILURE,
        };
        Self::new(code, err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;

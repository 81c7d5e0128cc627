use std::fmt;

use orbital_heat::Error;

/// Exit 1 for bad input, exit 2 for resource limits and failed tolerances.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Resource(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Resource(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::IncompleteBall { .. }
            | Error::DiscretenessSuspect { .. }
            | Error::TooFewPoints { .. }
            | Error::InadequateTail { .. }
            | Error::LinearAlgebra(_)
            | Error::Quadrature(_) => CliError::Resource(msg),
            _ => CliError::Input(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Resource(format!("writing CSV: {e}"))
    }
}

use thiserror::Error;

use crate::lti::LtiError;
use crate::mrac::MracError;
use crate::plant::PlantError;
use crate::signals::SignalError;
use crate::sim::ConfigError;
use crate::structure::StructureError;

/// Any failure surfaced by the scenario runner or the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Lti(#[from] LtiError),
    #[error(transparent)]
    Mrac(#[from] MracError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("state became non-finite at t = {t} s")]
    NonFiniteState { t: f64 },
    #[error("unknown system '{0}' (expected vd, va or butterworth)")]
    UnknownSystem(String),
}

/// Process exit status for the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Config = 2,
    InputData = 3,
    Numerical = 4,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

fn lti_exit(e: &LtiError) -> ExitCode {
    match e {
        LtiError::ConvergenceFailure(_) | LtiError::SingularSystem | LtiError::SingularAtFrequency(_) => {
            ExitCode::Numerical
        }
        _ => ExitCode::Config,
    }
}

impl Error {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Error::Config(_) | Error::Structure(_) | Error::UnknownSystem(_) => ExitCode::Config,
            Error::Signal(_) => ExitCode::InputData,
            Error::NonFiniteState { .. } => ExitCode::Numerical,
            Error::Lti(e) | Error::Mrac(MracError::Lti(e)) | Error::Plant(PlantError::Lti(e)) => lti_exit(e),
            Error::Mrac(_) | Error::Plant(_) => ExitCode::Config,
        }
    }
}

use std::fmt;
use std::process::ExitCode;

use epoint_core::Error;

pub const CONFIG: u8 = 2;
pub const NOTHING_FOUND: u8 = 3;
pub const RANGE: u8 = 4;
pub const NUMERICAL: u8 = 5;
const IO: u8 = 1;

/// An error paired with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type CmdResult<T> = Result<T, Failure>;

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }

    pub fn msg(code: u8, msg: impl fmt::Display) -> Self {
        Failure::new(code, anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        Failure {
            code: self.code,
            error: self.error.context(what.to_string()),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code)
    }
}

pub fn code_for(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidPotential(_) => CONFIG,
        Error::InvalidParameter { .. }
        | Error::Domain(_)
        | Error::Range(_)
        | Error::Uncalibrated
        | Error::OutsideValidity { .. } => RANGE,
        Error::Io(_) | Error::Csv(_) => IO,
        _ => NUMERICAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(code_for(&e), e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(IO, e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(IO, e)
    }
}

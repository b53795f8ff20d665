//! Status codes shared by the command line and the C interface.

use crate::decoder::DecodeError;
use crate::document::DocumentError;
use crate::instance::InstanceError;
use crate::oracle::OracleError;
use crate::schemes::SchemeError;
use crate::shuffle::ShuffleError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Status {
    Ok = 0,
    Unsatisfied = 1,
    InvalidInput = 2,
    NotConstructible = 3,
    ConstraintViolation = 4,
    CapExceeded = 5,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

/// Maps an error onto the status it should surface as.
pub trait HasStatus {
    fn status(&self) -> Status;
}

impl HasStatus for InstanceError {
    fn status(&self) -> Status {
        Status::InvalidInput
    }
}

impl HasStatus for DocumentError {
    fn status(&self) -> Status {
        Status::InvalidInput
    }
}

impl HasStatus for DecodeError {
    fn status(&self) -> Status {
        match self {
            DecodeError::ConstraintViolation { .. } => Status::ConstraintViolation,
            DecodeError::Malformed { .. } => Status::InvalidInput,
        }
    }
}

impl HasStatus for SchemeError {
    fn status(&self) -> Status {
        match self {
            SchemeError::Decode(e) => e.status(),
            _ => Status::NotConstructible,
        }
    }
}

impl HasStatus for OracleError {
    fn status(&self) -> Status {
        Status::CapExceeded
    }
}

impl HasStatus for ShuffleError {
    fn status(&self) -> Status {
        match self {
            ShuffleError::NoBaseline { .. } | ShuffleError::Config(_) => Status::InvalidInput,
            ShuffleError::Unsatisfied(_) => Status::Unsatisfied,
            ShuffleError::Scheme(e) => e.status(),
            ShuffleError::Decode(e) => e.status(),
        }
    }
}

use thiserror::Error;

use crate::concrete::ConcreteError;
use crate::coverability::CoverabilityError;
use crate::dsl::{FamilyError, ParseError};
use crate::limits::ResourceLimit;
use crate::model::{BuildError, ValidationError};
use crate::simulator::MonitorError;
use crate::symbolic::{SymbolicError, UncertifiedVerdict};

/// Any error raised by the toolkit, tagged with the module it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Concrete(#[from] ConcreteError),
    #[error(transparent)]
    Coverability(#[from] CoverabilityError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Uncertified(#[from] UncertifiedVerdict),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
}

impl Error {
    /// `module.kind`, stable for scripting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "dsl.parse",
            Error::Validation(_) => "model.validation",
            Error::Build(_) => "model.build",
            Error::Family(_) => "dsl.family",
            Error::Concrete(ConcreteError::NoProcesses) => "concrete.no-processes",
            Error::Concrete(ConcreteError::ResourceLimit(_)) => "concrete.resource-limit",
            Error::Coverability(CoverabilityError::AtomicUnsupported) => "coverability.atomic-unsupported",
            Error::Coverability(CoverabilityError::ResourceLimit(_)) => "coverability.resource-limit",
            Error::Symbolic(SymbolicError::Coverability(CoverabilityError::AtomicUnsupported)) => {
                "symbolic.atomic-unsupported"
            }
            Error::Symbolic(SymbolicError::Coverability(CoverabilityError::ResourceLimit(_))) => {
                "coverability.resource-limit"
            }
            Error::Symbolic(SymbolicError::ResourceLimit(_)) => "symbolic.resource-limit",
            Error::Uncertified(_) => "symbolic.uncertified",
            Error::Monitor(_) => "simulator.unknown-location",
        }
    }

    pub fn resource_limit(&self) -> Option<ResourceLimit> {
        match self {
            Error::Concrete(ConcreteError::ResourceLimit(e))
            | Error::Coverability(CoverabilityError::ResourceLimit(e))
            | Error::Symbolic(SymbolicError::ResourceLimit(e))
            | Error::Symbolic(SymbolicError::Coverability(CoverabilityError::ResourceLimit(e))) => Some(*e),
            _ => None,
        }
    }
}

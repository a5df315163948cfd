use thiserror::Error;

/// Subsystem that raised an error. Carried in messages so the CLI can name it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Module {
    Dynamics,
    Plane,
    Diophantine,
    Scrambled,
    Operator,
}

impl std::fmt::Display for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Module::Dynamics => "dynamics",
            Module::Plane => "plane",
            Module::Diophantine => "diophantine",
            Module::Scrambled => "scrambled",
            Module::Operator => "operator",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{module}: rejected input `{parameter}`: {reason}")]
    RejectedInput {
        module: Module,
        parameter: &'static str,
        reason: String,
    },

    #[error("{module}: precision exhausted for `{parameter}`: {reason}")]
    PrecisionExhausted {
        module: Module,
        parameter: &'static str,
        reason: String,
    },

    #[error("{module}: value out of floating-point range at n = {index}: {reason}")]
    NumericalRange { module: Module, index: i64, reason: String },

    #[error("{module}: integer overflow in `{parameter}` at depth {depth}")]
    Overflow {
        module: Module,
        parameter: &'static str,
        depth: usize,
    },

    #[error("{module}: dimension mismatch, expected {expected} got {found}")]
    DimensionMismatch {
        module: Module,
        expected: usize,
        found: usize,
    },
}

impl Error {
    pub(crate) fn rejected(module: Module, parameter: &'static str, reason: impl Into<String>) -> Self {
        Error::RejectedInput {
            module,
            parameter,
            reason: reason.into(),
        }
    }

    pub(crate) fn precision(module: Module, parameter: &'static str, reason: impl Into<String>) -> Self {
        Error::PrecisionExhausted {
            module,
            parameter,
            reason: reason.into(),
        }
    }

    pub(crate) fn range(module: Module, index: i64, reason: impl Into<String>) -> Self {
        Error::NumericalRange {
            module,
            index,
            reason: reason.into(),
        }
    }

    pub fn module(&self) -> Module {
        match self {
            Error::RejectedInput { module, .. }
            | Error::PrecisionExhausted { module, .. }
            | Error::NumericalRange { module, .. }
            | Error::Overflow { module, .. }
            | Error::DimensionMismatch { module, .. } => *module,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

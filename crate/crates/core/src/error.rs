use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector did not have the length the problem declares.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A problem definition violates one of its structural invariants.
    InvalidProblem(String),
    /// A run or variation parameter is outside its admissible range.
    InvalidConfig(String),
    UnknownProblem(String),
    /// The problem offers no way of producing a reference front.
    NoReferenceFront(String),
    EmptyReference,
    /// Another generation would overrun the evaluation budget.
    BudgetExhausted { used: u64, budget: u64 },
    /// Exact hypervolume is only implemented for two and three objectives.
    UnsupportedObjectiveCount(usize),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::InvalidProblem(msg) => write!(f, "invalid problem definition: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::UnknownProblem(name) => write!(f, "unknown problem `{name}`"),
            Error::NoReferenceFront(name) => {
                write!(f, "problem `{name}` has no reference front generator")
            }
            Error::EmptyReference => f.write_str("reference front is empty"),
            Error::BudgetExhausted { used, budget } => {
                write!(f, "{used} of {budget} evaluations used; no room for another generation")
            }
            Error::UnsupportedObjectiveCount(m) => {
                write!(f, "hypervolume supports 2 or 3 objectives, got {m}")
            }
        }
    }
}

impl core::error::Error for Error {}

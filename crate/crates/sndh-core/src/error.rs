use core::fmt;

/// Errors reported by the core algorithms.
///
/// Solver outcomes (infeasible, unbounded, limits) are not errors; they are
/// carried in [`crate::milp::Status`]. `Error` is reserved for inputs that
/// violate a documented precondition or for broken internal invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A documented precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// The input is structurally valid but degenerate for the algorithm
    /// (e.g. all scenarios identical when clustering).
    DegenerateInput(&'static str),
    /// A model could not be assembled from the given instance data.
    ModelBuild(&'static str),
    /// An internal invariant failed; indicates a bug, not bad input.
    Internal(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DegenerateInput(msg) => write!(f, "degenerate input: {msg}"),
            Error::ModelBuild(msg) => write!(f, "model build error: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

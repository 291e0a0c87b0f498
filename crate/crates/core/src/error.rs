use alloc::string::String;
use core::fmt;

/// Error type shared by every core operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violates the operation's preconditions.
    InvalidArgument(String),
    /// The request exceeds a size limit (qubit cap, device width).
    Resource(String),
    /// The request is well-formed but cannot be planned, e.g. a double-fault
    /// campaign on a circuit without neighboring qubits.
    Configuration(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn configuration(msg: impl Into<String>) -> Self {
        Error::Configuration(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::Resource(m) => write!(f, "resource limit: {m}"),
            Error::Configuration(m) => write!(f, "configuration error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T, E = Error> = core::result::Result<T, E>;

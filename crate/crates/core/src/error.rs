use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Duplicate, unknown or overlapping subsystem labels.
    #[error("labeling error: {0}")]
    Labeling(String),
    /// Dimensions that do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// Input outside the domain of a numerical routine (non-Hermitian, not PSD, ...).
    #[error("numeric domain error: {0}")]
    NumericDomain(String),
    /// Model parameter out of range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Parameter vector that cannot be normalized into a state.
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
}

impl Error {
    pub(crate) fn labeling(msg: impl Into<String>) -> Self {
        Error::Labeling(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::NumericDomain(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

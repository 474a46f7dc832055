use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of a function (negative radius, order too high, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value that violates a type invariant.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested computation is not supported for this configuration.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// A quadrature or fit failed to converge.
    #[error("numerical error in {context}: {detail}")]
    Numerical { context: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedConfiguration(msg.into())
    }

    pub(crate) fn numerical(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            detail: detail.into(),
        }
    }
}

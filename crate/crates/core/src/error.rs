use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed instance, file or command-line value.
    #[error("invalid input: {0}")]
    Input(String),

    /// A computation could not reach its requested accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Two independent computations of the same quantity disagree.
    #[error("internal consistency violated: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

impl Error {
    /// Process exit status for a run that stopped on this error: 2 for bad
    /// input, 3 for numerical or consistency breakdowns.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Input(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Numerical(_) | Error::Consistency(_) => 3,
        }
    }

    /// The message without the category prefix.
    pub fn detail(&self) -> String {
        match self {
            Error::Domain(m) | Error::Input(m) | Error::Numerical(m) | Error::Consistency(m) => m.clone(),
            other => other.to_string(),
        }
    }
}

use thiserror::Error;

/// Crate-wide error type. Variants map onto the failure classes the
/// decision pipeline distinguishes (and the CLI exit codes).
#[derive(Debug, Error)]
pub enum Error {
    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A caller violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds the configured budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Operation not defined for this input variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Search-based construction exhausted its budget without success.
    #[error("witness not found: {0}")]
    WitnessNotFound(String),

    /// Malformed problem or report file.
    #[error("input error: {0}")]
    Input(String),

    /// Two independent computation routes disagreed.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
}

impl Error {
    /// Prefix the message with a location tag, keeping the variant.
    pub fn tag(self, location: &str) -> Error {
        match self {
            Error::Numerical(m) => Error::Numerical(format!("{location}: {m}")),
            Error::Contract(m) => Error::Contract(format!("{location}: {m}")),
            Error::Domain(m) => Error::Domain(format!("{location}: {m}")),
            Error::Budget(m) => Error::Budget(format!("{location}: {m}")),
            Error::Unsupported(m) => Error::Unsupported(format!("{location}: {m}")),
            Error::WitnessNotFound(m) => Error::WitnessNotFound(format!("{location}: {m}")),
            Error::Input(m) => Error::Input(format!("{location}: {m}")),
            Error::Inconsistency(m) => Error::Inconsistency(format!("{location}: {m}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

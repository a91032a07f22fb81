use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid cube: {0}")]
    InvalidCube(String),
    #[error("invalid cube family: {0}")]
    InvalidFamily(String),
    #[error("cube family is empty for this domain")]
    EmptyFamily,
    #[error("family not replacement-closed: {0}")]
    NotReplacementClosed(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("exponent out of class: {0}")]
    OutOfClass(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` is singular at a grid center ({detail})")]
    Singularity { symbol: String, detail: String },
    #[error("no eligible cubes: {0}")]
    NoEligibleCubes(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("Luxemburg solver did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("format error: {0}")]
    Format(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

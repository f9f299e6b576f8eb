use alloc::string::String;

/// Errors raised by record handling, estimation and the pivotal engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The data cannot support the requested estimate (e.g. a single record).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("no sign change of g on [{lower:e}, {upper:e}]: g(lower) = {g_lower:e}, g(upper) = {g_upper:e}")]
    BracketFailure {
        lower: f64,
        upper: f64,
        g_lower: f64,
        g_upper: f64,
    },

    /// Raised from inside a Monte Carlo loop; carries the failing replicate.
    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: u64,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("observed information is not positive definite")]
    SingularInformation,

    #[error("point is not stationary: Newton step of {0:e} standard errors")]
    NotStationary(f64),

    #[error("insufficient draws: gamma * M / 2 = {0} < 1")]
    InsufficientDraws(f64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn in_replicate(self, replicate: u64) -> Self {
        Error::Replicate {
            replicate,
            source: alloc::boxed::Box::new(self),
        }
    }

    /// True for failures of the numerical machinery rather than of the data.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::BracketFailure { .. } | Error::SingularInformation | Error::NotStationary(_) => {
                true
            }
            Error::Replicate { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. `Re z ≤ 0` for log-gamma).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index ({0}) is not admissible")]
    NotAdmissible(String),

    #[error("{what} {value} exceeds the cap of {cap}")]
    Cap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("series does not converge: {0}")]
    Convergence(String),

    #[error("move {mv} is not legal for state {state}")]
    IllegalMove { mv: String, state: String },

    #[error("cannot parse {token:?}: {reason}")]
    Parse { token: String, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(token: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            reason: reason.into(),
        }
    }
}

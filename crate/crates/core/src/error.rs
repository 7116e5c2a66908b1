use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated an operation's domain (bad state, empty range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A run configuration is inconsistent or refers to an unsupported feature.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("symmetric eigensolver did not converge (dim = {dim})")]
    NoConvergence { dim: usize },

    /// A numerical invariant was broken (non-normalized eigenbasis, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Failure inside one disorder realization, with what is needed to reproduce it.
    #[error("realization {index} (phi = {phi:.17e}, seed = {seed}): {source}")]
    Realization {
        index: u64,
        phi: f64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    /// Process exit code for the command-line front end: 2 for bad input, 3 for numerics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::Realization { source, .. } => source.exit_code(),
            Error::NoConvergence { .. } | Error::Numeric(_) => 3,
            Error::Io(_) | Error::Json(_) => 3,
        }
    }
}

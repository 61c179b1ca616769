use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("target {target} for `{name}` is outside the attainable range ({lo}, {hi})")]
    Unattainable {
        name: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("root finding did not converge after {iterations} iterations; last bracket [{lo}, {hi}]")]
    NonConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("species {index}: {source}")]
    Species {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_species(self, index: usize) -> Self {
        Error::Species {
            index,
            source: Box::new(self),
        }
    }

    /// True for numeric failures (as opposed to bad input).
    pub fn is_non_convergence(&self) -> bool {
        match self {
            Error::NonConvergence { .. } => true,
            Error::Species { source, .. } => source.is_non_convergence(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

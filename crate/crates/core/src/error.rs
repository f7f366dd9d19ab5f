use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent probabilities: {0}")]
    Inconsistent(String),

    #[error("posterior undefined: observed evidence has zero total probability")]
    UndefinedPosterior,

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("maxent solver did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("norm drift {drift:e} at step {step} exceeds tolerance {tolerance:e}")]
    Stability {
        step: usize,
        drift: f64,
        tolerance: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("hermite order {0} exceeds the supported maximum of 60")]
    HermiteOverflow(u32),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

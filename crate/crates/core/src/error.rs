use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the learn-then-design pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{quantity} = {value} outside valid domain {domain}")]
    Domain {
        quantity: &'static str,
        value: f64,
        domain: String,
    },

    #[error("shadowing spread is zero; the density of the shadowing difference is degenerate")]
    DegenerateSigma,

    #[error("quadrature did not converge to {tolerance:e} (estimate {estimate})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("inconsistent boundary pair: inner {inner:?}, outer {outer:?}")]
    ImpossibleCase {
        inner: crate::learner::BoundaryIndex,
        outer: crate::learner::BoundaryIndex,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(
        "comparator `{0}` is not implemented: its definition lives in an external publication"
    )]
    NotImplemented(&'static str),

    #[error("failed to parse configuration: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            quantity,
            value,
            domain: domain.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

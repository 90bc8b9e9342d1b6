use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("substream label must not be empty")]
    EmptyLabel,

    #[error("invalid value for {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("port {port} out of range for a detector with {ports} ports")]
    PortOutOfRange { port: usize, ports: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cosine fit is degenerate: all cosine values are equal")]
    DegenerateFit,

    #[error("cosine fit produced a non-positive amplitude {0}")]
    NonPositiveAmplitude(f64),

    #[error("{0} prediction needs fitted (a, b) constants")]
    MissingFitConstants(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("visibility is undefined for an all-zero signal")]
    ZeroSignal,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

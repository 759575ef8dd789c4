use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation; `key` is the dotted path of
    /// the offending field.
    #[error("invalid config `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("patient is unreachable (accessibility must be positive, got {0})")]
    Unreachable(f64),

    /// Neither the GPS nor the autonomous estimate is usable.
    #[error("total localization loss: no valid pose estimate to fuse")]
    LocalizationLost,

    #[error("{0} requires a nonempty sample")]
    EmptySample(&'static str),

    #[error("{what} requires at least {min} samples, got {got}")]
    TooFewSamples {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("malformed trials file at line {line}: {reason}")]
    TrialsFormat { line: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by callers (the CLI maps these to exit codes).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad configuration or arguments.
    Usage,
    /// Unreadable, malformed, or invariant-violating input data.
    Data,
    /// A failure inside a training stage.
    Train,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid config: field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("session has {frames} frames, need at least window_len = {window_len}")]
    TooShortSession { frames: usize, window_len: usize },

    #[error("{what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: String,
        expected: String,
        got: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("cohort has {children} children, need at least {needed} for a by-child split")]
    TooFewChildren { children: usize, needed: usize },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("training failed: {0}")]
    Train(String),

    #[error("unsupported model bundle version {found} (expected {expected})")]
    BundleVersion { found: u32, expected: u32 },

    #[error("malformed model bundle: {0}")]
    Bundle(String),
}

impl Error {
    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn invalid_config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn shape(what: impl Into<String>, expected: impl ToString, got: impl ToString) -> Self {
        Error::ShapeMismatch {
            what: what.into(),
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }

    /// Wraps an error with the pipeline stage it occurred in.
    pub fn in_stage(stage: &'static str, source: Error) -> Self {
        Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidConfig { .. } => ErrorClass::Usage,
            Error::Train(_) => ErrorClass::Train,
            Error::Stage { source, .. } => match source.class() {
                ErrorClass::Usage => ErrorClass::Usage,
                _ => ErrorClass::Train,
            },
            _ => ErrorClass::Data,
        }
    }
}

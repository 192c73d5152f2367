use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed WFDB header {path}: {msg}")]
    HeaderParse { path: PathBuf, msg: String },

    #[error("unsupported WFDB signal format {0} (supported: 212, 16)")]
    UnsupportedFormat(i32),

    #[error("malformed annotation file {path}: {msg}")]
    AnnotationParse { path: PathBuf, msg: String },

    #[error("empty input to {op}")]
    EmptyInput { op: &'static str },

    #[error("{op}: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    #[error("{op}: expected length {expected}, got {got}")]
    ShapeMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage `{stage}` requires artifact `{artifact}` from stage `{upstream}`; run that stage first")]
    MissingUpstream {
        stage: &'static str,
        upstream: &'static str,
        artifact: PathBuf,
    },

    #[error("artifact {path}: {msg}")]
    Artifact { path: PathBuf, msg: String },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("JSON error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("TOML error on {path}: {msg}")]
    Toml { path: PathBuf, msg: String },
}

impl Error {
    /// Attach a path to a raw I/O error.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

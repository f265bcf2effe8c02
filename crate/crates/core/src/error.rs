//! Error type shared by every module of the crate.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand shapes do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A (numerically) dependent column in QR, or too few nonzero eigenvalues.
    #[error("rank deficient at column {column}: magnitude {diag:e} below threshold {threshold:e}")]
    RankDeficient {
        column: usize,
        diag: f64,
        threshold: f64,
    },

    /// Input that has no meaningful answer, e.g. a zero vector or all-zero data.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("stream produced no blocks")]
    EmptyStream,

    /// A step of a streaming run failed. `block` is 1-based.
    #[error("block {block}: {source}")]
    AtBlock {
        block: usize,
        #[source]
        source: Box<Error>,
    },

    /// NaN or infinity showed up in the iterate, gradient or accumulator.
    #[error("non-finite value in {what}{}", detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default())]
    NonFinite {
        what: &'static str,
        detail: Option<String>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_block(self, block: usize) -> Self {
        match self {
            e @ Error::AtBlock { .. } => e,
            e => Error::AtBlock {
                block,
                source: Box::new(e),
            },
        }
    }

    /// The error with any block annotation stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtBlock { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code used by the command line tool.
    ///
    /// 2 for configuration problems, 3 for data problems, 4 for numerical faults.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::InvalidArgument(_) => 2,
            Error::Parse { .. } | Error::Format(_) | Error::Io { .. } | Error::EmptyStream => 3,
            Error::DimensionMismatch(_) => 3,
            Error::RankDeficient { .. } | Error::Degenerate(_) | Error::NonFinite { .. } => 4,
            Error::AtBlock { .. } => unreachable!(),
        }
    }
}

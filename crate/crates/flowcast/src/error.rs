use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Dimension mismatch between operands; the message names both shapes.
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    /// Invalid configuration value or combination.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or out-of-contract input data (CSV ingestion, empty windows, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A metric is mathematically undefined for the given inputs.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// Iterative solver failed to reach its stopping criterion.
    #[error("failed to converge: {0}")]
    Convergence(String),

    /// Training produced a non-finite loss or gradient.
    #[error("training diverged at epoch {epoch}, batch {batch} ({detail}); last good epoch: {last_good}")]
    Diverged {
        epoch: usize,
        batch: usize,
        detail: String,
        last_good: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("model file error: {0}")]
    ModelFormat(String),
}

impl Error {
    pub fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    /// Process exit code for the CLI contract: 2 config, 3 data, 4 divergence,
    /// 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Shape { .. } => 2,
            Error::Data(_) | Error::UndefinedMetric(_) | Error::Io(_) | Error::ModelFormat(_) => 3,
            Error::Diverged { .. } | Error::Convergence(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

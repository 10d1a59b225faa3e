use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad shapes, out-of-range parameters, missing inputs.
    #[error("{0}")]
    Argument(String),

    #[error("{0}")]
    Numerical(String),

    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("unstable level scaling: feature {feature} has mean {mean:e}")]
    UnstableLevel { feature: usize, mean: f64 },

    #[error("coordinate descent did not converge after {sweeps} sweeps")]
    Convergence { sweeps: usize, trace: Vec<f64> },

    #[error("{0}")]
    Training(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable identifier, used as the `<code>` in CLI error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::Numerical(_) | Error::NotPositiveDefinite { .. } => "numerical",
            Error::UnstableLevel { .. } => "unstable-level",
            Error::Convergence { .. } => "convergence",
            Error::Training(_) => "training",
            Error::Parse { .. } => "parse",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }

    /// True for errors caused by how the library was called rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Argument(_))
    }
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

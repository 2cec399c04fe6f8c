use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input data is unusable (empty, all zero, negative, non-finite).
    #[error("data: {0}")]
    Data(String),

    /// The caller combined arguments that do not fit together.
    #[error("usage: {0}")]
    Usage(String),

    /// A gradient term needs `y_k / (x*x)_k` with `y_k > 0` and `(x*x)_k = 0`.
    #[error("undefined gradient: coordinate {index} needs y[{k}] / (x*x)[{k}] with (x*x)[{k}] = 0")]
    UndefinedGradient { index: usize, k: usize },

    /// The Hessian needs `(x*x)_k > 0` wherever `y_k > 0`.
    #[error("undefined Hessian: y[{k}] > 0 but (x*x)[{k}] = 0")]
    UndefinedHessian { k: usize },

    /// The Y-step of the lifted problem has no feasible solution.
    #[error("infeasible lift: y[{row}] > 0 but (x*x)[{row}] = 0")]
    InfeasibleLift { row: usize },

    /// The multiplicative update hit a zero denominator it cannot resolve.
    #[error("undefined update: coordinate {index} needs y[{k}] / (x*x)[{k}] with (x*x)[{k}] = 0")]
    UndefinedUpdate { index: usize, k: usize },

    /// The objective is infinite at the iterate; the run cannot proceed.
    #[error("divergence is infinite at iteration {iteration}: x*x vanishes where y is positive")]
    InfiniteDivergence { iteration: usize },

    /// Malformed input file.
    #[error("parse error in {path}: {location}: {message}")]
    Parse {
        path: PathBuf,
        location: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by how the library was called rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

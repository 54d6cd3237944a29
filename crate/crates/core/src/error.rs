use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid trajectory data; `path` names the offending config field.
    #[error("invalid trajectory at `{path}`: {message}")]
    InvalidTrajectory { path: String, message: String },

    #[error("failed to parse trajectory config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("trajectory is not admissible up to t = {stop_time}: {quantity} bound {bound} ({reason})")]
    NotAdmissible {
        stop_time: f64,
        quantity: &'static str,
        bound: f64,
        reason: &'static str,
    },

    #[error("point ({x}, {y}, {z}; t = {t}) is not in G: delay {delay:e} <= {threshold:e}")]
    OutsideG {
        x: f64,
        y: f64,
        z: f64,
        t: f64,
        delay: f64,
        threshold: f64,
    },

    #[error("retarded-time iteration did not certify tolerance {tol:e} within {iterations} iterations (last bound {bound:e})")]
    IterationLimit { iterations: usize, tol: f64, bound: f64 },

    #[error("invalid argument `{name}`: {message}")]
    InvalidArgument { name: &'static str, message: String },

    #[error("chart {chart} is not valid at this point: {message}")]
    ChartDomain { chart: String, message: String },

    #[error("I/O error on {path:?}: {source}")]
    Io {
        path: Option<PathBuf>,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid_argument(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: Option<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path, source }
    }
}

impl From<std::io::Error> for Error {
    fn from(source: std::io::Error) -> Self {
        Error::Io { path: None, source }
    }
}

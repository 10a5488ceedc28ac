use thiserror::Error;

/// Errors raised by the numerical and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular argument: {0}")]
    Singularity(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("solver failure (condition estimate {cond:.3e}): {msg}")]
    Solver { msg: String, cond: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("acquisition {index}: {source}")]
    Acquisition { index: usize, source: Box<Error> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

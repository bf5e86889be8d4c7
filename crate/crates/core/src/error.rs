use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("inadmissible scaling pair (alpha={alpha}, beta={beta}): {reason}")]
    InadmissiblePair { alpha: f64, beta: f64, reason: String },

    #[error("unsupported geometry: {0}")]
    Geometry(String),

    #[error("zero nonlinear mass: no Nehari rescaling exists")]
    ZeroNonlinearMass,

    #[error("zero field")]
    ZeroField,

    #[error("condition violated: {0}")]
    Condition(String),

    #[error("no shooting bracket found in amplitude range [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("solver did not converge after {iterations} iterations (last residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("solver collapsed to the zero field")]
    Collapsed,

    #[error("threshold flow failed for pair (alpha={alpha}, beta={beta}): {source}")]
    PairFailed {
        alpha: f64,
        beta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("cutoff constraint violated: {0}")]
    Cutoff(String),

    #[error("non-finite values after a time step: {0}")]
    NonFinite(String),

    #[error("invalid evolution config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

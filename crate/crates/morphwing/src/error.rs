//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gimbal lock: pitch {pitch:.6} rad is within {margin:.0e} rad of +/-pi/2")]
    GimbalLock { pitch: f64, margin: f64 },

    #[error("numerical singularity: {0}")]
    NumericalSingularity(String),

    #[error("singular linkage configuration: closure Jacobian rank-deficient (|det| = {det:.3e})")]
    SingularConfiguration { det: f64 },

    #[error("linkage position solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),

    #[error("non-finite derivative at t = {time:.6}: {detail}")]
    NonFiniteDerivative { time: f64, detail: String },

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("log schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("unknown plot channel '{0}'")]
    UnknownChannel(String),

    #[error("invalid config at `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl Error {
    pub fn invalid_config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

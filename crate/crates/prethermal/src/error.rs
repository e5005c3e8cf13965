use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} = {requested} (cap {cap})")]
    Capacity {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no spectral entries below omega_max = {omega_max}")]
    EmptyEnvelope { omega_max: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("quadrature did not converge: achieved relative error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("solver did not converge: {0}")]
    Solver(String),

    #[error("saddle point invalid: second derivative {phi2} is not positive")]
    Saddle { phi2: f64 },

    #[error("principal logarithm is ambiguous: eigenphase {phase} too close to ±pi")]
    Branch { phase: f64 },

    #[error("ill-conditioned least-squares fit (condition number {condition:e})")]
    Conditioning { condition: f64 },

    #[error("norm drift {drift:e} exceeds tolerance at step {step}")]
    NormDrift { drift: f64, step: usize },

    #[error("plan is not valid: lambda = {lambda} is below the threshold {lambda_min}")]
    InvalidPlan { lambda: f64, lambda_min: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable category, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Capacity { .. } => "capacity",
            Error::Parameter(_) => "parameter",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::EmptyEnvelope { .. } => "empty_envelope",
            Error::Fit(_) => "fit",
            Error::Quadrature { .. } => "quadrature",
            Error::Solver(_) => "solver",
            Error::Saddle { .. } => "saddle",
            Error::Branch { .. } => "branch",
            Error::Conditioning { .. } => "conditioning",
            Error::NormDrift { .. } => "norm_drift",
            Error::InvalidPlan { .. } => "invalid_plan",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

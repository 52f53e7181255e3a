use thiserror::Error;

/// Errors raised by the simulation and numerics layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument `{name}` out of domain: {value} ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid too coarse: first-cell kernel mass {0} is not below 1")]
    GridTooCoarse(f64),

    #[error("horizon exceeded: requested {requested}, table covers {available}")]
    HorizonExceeded { requested: f64, available: f64 },

    #[error("test function support end {support} exceeds grid horizon {horizon}")]
    SupportExceedsHorizon { support: f64, horizon: f64 },

    #[error("cluster expansion exceeded the event cap of {cap} events")]
    EventCapExceeded { cap: u64 },

    #[error("operation requires a monotone nonincreasing kernel density, got {0}")]
    NonMonotoneKernel(&'static str),

    #[error("estimator failure: {0}")]
    Estimator(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {err:e})")]
    Quadrature { tol: f64, err: f64 },

    #[error("tabulation cache: {0}")]
    Cache(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        reason,
    }
}

pub(crate) fn require_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(name, value, "must be finite and nonnegative"))
    }
}

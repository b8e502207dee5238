use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid law: {0}")]
    InvalidLaw(String),

    #[error("invalid step law: {0}")]
    InvalidStepLaw(String),

    #[error("law is not transient to the right (E[log rho] = {mean_log_rho})")]
    NotTransientRight { mean_log_rho: f64 },

    #[error("kappa is only defined for negative drift (E[log rho] = {mean_log_rho})")]
    NonNegativeDrift { mean_log_rho: f64 },

    #[error("step law has non-negative mean {mean}")]
    NonNegativeStepMean { mean: f64 },

    #[error("step law has no positive support point, so no tilt root exists")]
    NoPositiveSupport,

    #[error("root not bracketed below cap {cap}")]
    RootBeyondCap { cap: f64 },

    #[error("convexity check failed: E[exp((gamma/2) xi)] = {value} is not below 1")]
    ConvexityCheck { value: f64 },

    #[error("tilted weights sum to {sum}, expected 1")]
    BadTilt { sum: f64 },

    #[error("step law is not lattice")]
    NotLattice,

    #[error("site {site} outside window [{lo}, {hi}]")]
    OutOfWindow { site: i64, lo: i64, hi: i64 },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error(
        "escape bound {bound:e} could not be certified below {eps:e} within {max_sites} sites"
    )]
    EscapeNotCertified {
        bound: f64,
        eps: f64,
        max_sites: i64,
    },

    #[error("series did not converge: {0}")]
    NotConverged(String),

    #[error("{failed} of {total} environments failed to converge (allowed fraction {allowed})")]
    TooManyFailures {
        failed: usize,
        total: usize,
        allowed: f64,
    },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (branch point, pole hit).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation at k = {k} lies within {radius:e} of pole #{index} at {pole}")]
    PoleProximity {
        index: usize,
        pole: Complex64,
        k: Complex64,
        radius: f64,
    },

    #[error("invalid configuration: {0}")]
    Configuration(String),

    /// A time outside the half-line on which a semigroup evolution is defined.
    #[error("t = {0} lies outside the semigroup domain")]
    SemigroupDomain(f64),

    #[error("Hardy class mismatch: {0}")]
    HardyClass(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("integrand not integrable: {0}")]
    Integrability(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("contour geometry: {0}")]
    Geometry(String),

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error("deviation threshold not reached within the sampled window (last t = {last_t}, max deviation = {max_deviation})")]
    Window { last_t: f64, max_deviation: f64 },

    #[error("power-law fit rejected: {0}")]
    Regime(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("selected outcome has zero probability")]
    ZeroProbability,

    /// Registration times must follow the preparation time t0 = 0 and each other.
    #[error("arrow of time violated: {0}")]
    ArrowOfTime(String),
}

/// Rejects negative times for forward-only evolutions.
pub(crate) fn require_forward_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::SemigroupDomain(t))
    } else {
        Ok(())
    }
}

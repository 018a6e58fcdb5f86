use thiserror::Error;

/// Errors produced by the engine.
///
/// Variants fall into two groups: configuration problems (bad parameters,
/// grids that violate a guard, malformed tables) and numerical failures
/// (non-convergence, quadrature failure). [`Error::is_config`] tells them apart
/// so the CLI can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rate `{name}` must be non-negative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },
    #[error("both coupling strengths are zero")]
    ZeroCoupling,
    #[error("cavity decay rate must be positive, got {0}")]
    NonPositiveKappa(f64),
    #[error("invalid mirror: {0}")]
    InvalidMirror(String),
    #[error("evaluation at a pole ({0})")]
    PoleProximity(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("tabulated spectrum is empty")]
    EmptyTable,
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("closed form requires gamma = 0 (got {0}); use the quadrature route")]
    GammaUnsupported(f64),
    #[error("spectrum is not normalized: norm = {0}")]
    UnnormalizedSpectrum(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("initial state norm {0} < 0.99 before renormalization; widen the bandwidth")]
    NormDeficit(f64),
    #[error("norm drift {drift:e} exceeds {limit:e}")]
    NormDriftExceeded { drift: f64, limit: f64 },
    #[error("simulation not converged: excited population {0:e} at t_final")]
    NotConverged(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by the caller's input rather than by numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::NegativeRate { .. }
                | Error::NonFinite { .. }
                | Error::ZeroCoupling
                | Error::NonPositiveKappa(_)
                | Error::InvalidMirror(_)
                | Error::EmptyTable
                | Error::InvalidSpectrum(_)
                | Error::GammaUnsupported(_)
                | Error::UnnormalizedSpectrum(_)
                | Error::GridTooCoarse(_)
                | Error::NormDeficit(_)
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

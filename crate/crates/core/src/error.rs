use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A crystal parameter or physical input violated its invariant. The
    /// payload names the violated condition, e.g. `"M < 3"`.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid detuning schedule: {0}")]
    Schedule(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error(
        "phase step {max_phase:.4} rad exceeds pi/4 in schedule segment {segment}; reduce the time step"
    )]
    PhaseResolution { segment: usize, max_phase: f64 },

    #[error("oracle spectrum deviates from the analytic bands: max_rel_dev = {0:e}")]
    OracleMismatch(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. } | Error::PhaseResolution { .. } | Error::OracleMismatch(_)
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

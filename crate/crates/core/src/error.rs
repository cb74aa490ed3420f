use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("propagator did not converge: requested tolerance {requested:e}, achieved {achieved:e} with {steps} steps")]
    NonConvergence {
        requested: f64,
        achieved: f64,
        steps: usize,
    },

    #[error("integrator step size underflow at t = {t} ns (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("branch {label} is broken (last good amplitude {last_good} GHz)")]
    BrokenBranch { label: String, last_good: f64 },

    #[error("missing branch {0}")]
    MissingBranch(String),

    #[error("Fourier normalization defect {defect:e} exceeds {limit:e} at {samples} samples")]
    Normalization {
        defect: f64,
        limit: f64,
        samples: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("amplitudes outside the quadratic regime: {0}")]
    NotQuadratic(String),

    #[error("formula domain violated: {0}")]
    Domain(String),

    #[error("singular: {0}")]
    Singular(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

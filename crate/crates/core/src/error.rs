use thiserror::Error;

use crate::fourier::Mode;

pub type Result<T, E = EddyError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EddyError {
    #[error("the zero mode is not part of the mean-zero basis")]
    ZeroMode,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("cutoff mismatch: expected {expected}, found {found}")]
    CutoffMismatch { expected: u32, found: u32 },

    #[error("noise coefficients are not radially symmetric (|k|² = {norm_sq})")]
    NotRadial { norm_sq: i64 },

    #[error("Lévy measure is not symmetric: {0}")]
    AsymmetricMeasure(String),

    #[error("jump events are not sorted by time (event {index})")]
    UnsortedEvents { index: usize },

    #[error("jump event at mode {0} lies outside the noise support")]
    ModeOutsideSupport(Mode),

    #[error("time step {dt:e} violates the CFL bound {max_dt:e}")]
    CflViolation { dt: f64, max_dt: f64 },

    #[error("numerical failure on path {path} at t = {time}: {reason}")]
    Numerical { path: usize, time: f64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl EddyError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        EddyError::InvalidParameter { name, reason: reason.into() }
    }
}

use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Divergent amplitudes are not an error; they are reported through the
/// singular mask of trajectories and sweeps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("quartic root polishing did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("ambiguous branch assignment at time index {index}")]
    BranchAmbiguity { index: usize },

    #[error("self-consistency singular: |2E + c| = {magnitude:e}")]
    SelfConsistencySingular { magnitude: f64 },

    #[error("eigenvectors coalesce (biorthogonal overlap {overlap:e})")]
    ExceptionalPoint { overlap: f64 },

    #[error("adaptive step underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("angle integration stalled at a Bloch-sphere pole at t = {t}")]
    PoleStall { t: f64 },

    #[error("state has zero norm")]
    ZeroState,

    #[error("trapping window {window} shorter than one drive period {period}")]
    WindowTooShort { window: f64, period: f64 },

    #[error("loop not closed: endpoint mismatch {mismatch:e}")]
    NotClosed { mismatch: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParams { field, reason: reason.into() }
    }

    /// Stable short code used in sweep error layers and CLI diagnostics.
    pub fn code(&self) -> u8 {
        match self {
            Error::InvalidParams { .. } => 1,
            Error::NonFinite { .. } => 2,
            Error::NoConvergence { .. } => 3,
            Error::BranchAmbiguity { .. } => 4,
            Error::SelfConsistencySingular { .. } => 5,
            Error::ExceptionalPoint { .. } => 6,
            Error::StepUnderflow { .. } => 7,
            Error::TooManySteps { .. } => 8,
            Error::PoleStall { .. } => 9,
            Error::ZeroState => 10,
            Error::WindowTooShort { .. } => 11,
            Error::NotClosed { .. } => 12,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeakBeamError {
    /// Pre- and post-selected states are (numerically) orthogonal, so the
    /// weak value diverges.
    #[error("post-selected state is orthogonal to the pre-selected state (|overlap| = {overlap:e} <= {tolerance:e})")]
    OrthogonalPostSelection { overlap: f64, tolerance: f64 },

    #[error("degenerate Sagnac phase (phi = {phi}): the expression is singular")]
    DegeneratePhase { phi: f64 },

    #[error("degenerate image distance (s_i = {s_i})")]
    DegenerateImageDistance { s_i: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid two-level state: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("fields are sampled on different grids")]
    GridMismatch,

    #[error("momentum kick {kappa:e} 1/m exceeds the Nyquist limit {limit:e} 1/m")]
    NyquistViolation { kappa: f64, limit: f64 },

    #[error("propagation distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("field carries no energy")]
    NullField,

    #[error("Gaussian fit did not converge within {iterations} iterations")]
    FitDiverged { iterations: usize },
}

pub type Result<T, E = WeakBeamError> = std::result::Result<T, E>;

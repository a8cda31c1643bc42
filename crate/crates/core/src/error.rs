use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by path construction, spin algebra and propagation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported spin quantum number {0}: only j = 1/2 and j = 1 are available")]
    UnsupportedSpin(f64),

    #[error("state vector norm {norm} deviates from 1 beyond tolerance")]
    NotNormalized { norm: f64 },

    #[error("matrix is not anti-Hermitian: ||A + A'|| = {residual:.3e}")]
    NotAntiHermitian { residual: f64 },

    #[error("non-finite value for {what}")]
    NonFinite { what: &'static str },

    #[error("invalid helix geometry: {reason}")]
    InvalidHelix { reason: String },

    #[error("polar angle {theta} outside [0, pi]")]
    PolarAngleOutOfRange { theta: f64 },

    #[error("path ingestion failed: {0}")]
    Ingest(String),

    #[error("sample times must be strictly increasing")]
    NonMonotoneTimes,

    #[error(
        "azimuthal step of {delta:.4} rad at sample {index} is ambiguous (|dphi| must stay \
         below pi); sample the path more densely"
    )]
    PhiJump { index: usize, delta: f64 },

    #[error("time {t} outside the sampled path domain [{start}, {end}]")]
    DomainExceeded { t: f64, start: f64, end: f64 },

    #[error("rotating-frame decomposition is degenerate at theta = {theta} (requires 0 < theta < pi, theta != pi/2)")]
    DegenerateTheta { theta: f64 },

    #[error("rotation rate gamma must be nonzero and finite")]
    InvalidRotationRate,

    #[error("integration step too large: estimated local truncation {estimate:.3e} exceeds {limit:.1e}")]
    StepTooLarge { estimate: f64, limit: f64 },

    #[error("norm drift {drift:.3e} exceeds tolerance {tolerance:.1e}; reduce the step")]
    NormDrift { drift: f64, tolerance: f64 },

    #[error("frame overlap {overlap:.3e} at t = {t} below threshold; wrong sigma or theta for this trajectory")]
    FrameOverlapLost { t: f64, overlap: f64 },

    #[error("phase series grids do not match")]
    GridMismatch,

    #[error("states are near-orthogonal (|overlap| = {overlap:.3e}); relative phase undefined")]
    NearOrthogonalStates { overlap: f64 },

    #[error("wave vector has zero magnitude")]
    ZeroWaveVector,

    #[error("longitudinal polarization (m = 0) is not a valid initial state")]
    LongitudinalState,
}

//! Tolerances shared by the library checks, the verification sweep and the
//! acceptance suite.
//!
//! Algebraic identities evaluated in one or two floating-point operations sit
//! near machine epsilon; anything involving an eigendecomposition or an
//! accumulated sum gets a correspondingly looser budget.

/// Entrywise tolerance for spin commutation relations and the Casimir identity.
pub const COMMUTATOR: f64 = 1e-14;

/// `||U U' - I||` budget for matrix exponentials of anti-Hermitian input.
pub const UNITARITY: f64 = 1e-12;

/// Allowed deviation of a state-vector norm from 1 at construction.
pub const STATE_NORM: f64 = 1e-12;

/// Anti-Hermiticity residual accepted by the matrix exponential.
pub const ANTI_HERMITIAN: f64 = 1e-12;

/// Default integrator norm-drift budget over a full run.
pub const NORM_DRIFT: f64 = 1e-10;

/// Helicity-expectation drift budget over ten rotation periods.
pub const HELICITY_DRIFT: f64 = 1e-8;

/// State-vector deviation between the propagator and the closed-form solution.
pub const ORACLE_STATE: f64 = 1e-8;

/// Dynamical phase must satisfy `|phi_d(t)| < DYNAMICAL_PHASE_RATE * gamma * t`.
pub const DYNAMICAL_PHASE_RATE: f64 = 1e-9;

/// Rotating-frame parameter relation: `|w1^2 + w0^2 + gamma w0| <= tol * gamma^2`.
pub const WANG_KEIJI_RESIDUAL: f64 = 1e-12;

/// Normalized residual of the wave-vector motion identity on analytic paths.
pub const MOTION_IDENTITY: f64 = 1e-10;

/// Relative orthogonality budget between the effective field and the wave vector.
pub const FIELD_ORTHOGONALITY: f64 = 1e-10;

/// Absolute budget for the extracted geometric phase against the linear law.
pub const GEOMETRIC_PHASE_ABS: f64 = 1e-8;

/// Phase agreement budget for runs driven by finite-difference sampled paths.
pub const SAMPLED_PATH_PHASE: f64 = 1e-6;

/// Minimum |overlap| between a trajectory and its moving frame.
pub const FRAME_OVERLAP_MIN: f64 = 0.1;

/// Minimum |overlap| for a defined Pancharatnam phase.
pub const PANCHARATNAM_OVERLAP_MIN: f64 = 1e-6;

/// Estimated per-step local truncation above which the step is refused.
pub const LOCAL_TRUNCATION_LIMIT: f64 = 1e-6;

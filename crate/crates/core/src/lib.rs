//! Spin-model simulation of the nonadiabatic geometric phase picked up by
//! polarized light guided along a noncoplanarly coiled fiber.
//!
//! A perfect guide steers the wave vector k(t) along the fiber tangent at
//! constant magnitude, which makes the polarization obey
//! i dpsi/dt = [k x kdot / k^2] . S psi. This crate builds that Hamiltonian
//! for helical and arbitrary smooth paths, propagates it with fixed-step RK4,
//! evaluates the exact closed-form solution of the helix case as an
//! independent oracle, and decomposes the accumulated phase into dynamical
//! and geometric parts (the dynamical part vanishes for any honest fiber
//! field; the geometric part follows the solid-angle law).
//!
//! Conventions: hbar = 1, phases carry exp(-i phi), the S_z basis is ordered
//! m = +j..-j, and sigma = +-1 labels the extremal m = +-j states.
//!
//! One full turn at a 60 degree cone angle accumulates a geometric phase of
//! exactly pi (and no dynamical phase at all):
//!
//! ```
//! use coilphase::*;
//! use std::f64::consts::{FRAC_PI_3, PI};
//!
//! let rep = SpinRepresentation::new(SpinJ::One);
//! let (theta, gamma) = (FRAC_PI_3, 2.0);
//! let path = PathSpec::helix(theta, gamma, 1.0).unwrap();
//! let psi0 = conditional_initial_state(HelicitySign::Plus, theta, &rep).unwrap();
//! let period = 2.0 * PI / gamma;
//! let t: Vec<f64> = (0..=6283).map(|i| period * i as f64 / 6283.0).collect();
//! let opts = IntegratorOptions::new(period / 6283.0);
//! let traj = integrate(&path.effective_field(), &rep, &psi0, &t, &opts).unwrap();
//! let phases = decompose_phases(&traj, &path, HelicitySign::Plus, &rep).unwrap();
//! assert!((phases.geometric.last().unwrap() - PI).abs() < 1e-8);
//! assert!(phases.dynamical.last().unwrap().abs() < 1e-9 * gamma * period);
//! ```

pub mod error;
pub mod evolution;
pub mod geometry;
mod interp;
pub mod phase;
pub mod spin;
pub mod tol;

pub use error::{Error, Result};
pub use evolution::{
    closed_form_state, conditional_initial_state, frame_eigenstate, hamiltonian_at, integrate,
    wang_keiji_coefficients, wang_keiji_decompose, ClosedFormSolution, ClosedFormState,
    EvolutionResult, IntegratorOptions, WangKeijiParams,
};
pub use geometry::{
    check_motion_identity, helix_gamma, helix_wavevector, ingest_path, initial_wavevector_check,
    parse_path_text, random_smooth_path, read_path_file, wrap_to_pm_pi, EffectiveField,
    GammaConvention, Handedness, HelixSpec, IngestRows, MotionIdentityReport, PathSpec,
    SampledPath, TrigPath, SPEED_OF_LIGHT,
};
pub use phase::{
    decompose_phases, dynamical_phase, frame_phase, geometric_phase, helicity_expectation,
    pancharatnam_phase, solid_angle_phase, unwrap_phases, PhaseDecomposition,
};
pub use spin::{
    expm_antihermitian, ladder_rotation, rotation_y, spin_expectation, HelicitySign, SpinJ,
    SpinRepresentation, StateVector,
};

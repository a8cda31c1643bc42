//! Cross-module invariants exercised over randomized inputs.

use std::f64::consts::PI;

use coilphase::{
    conditional_initial_state, decompose_phases, frame_eigenstate, integrate, ladder_rotation,
    solid_angle_phase, spin_expectation, tol, HelicitySign, IntegratorOptions, PathSpec, SpinJ,
    SpinRepresentation, StateVector, TrigPath,
};
use nalgebra::Vector3;
use num_complex::Complex64;
use proptest::prelude::*;

fn grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
}

proptest! {
    /// The frame rotation sends |sigma> onto the cone: <S> = m khat.
    #[test]
    fn ladder_rotation_traces_the_cone(
        theta in 0.0f64..PI,
        wt in -8.0f64..8.0,
    ) {
        for j in [SpinJ::Half, SpinJ::One] {
            let rep = SpinRepresentation::new(j);
            for sigma in [HelicitySign::Plus, HelicitySign::Minus] {
                let beta = Complex64::from_polar(theta / 2.0, -wt) * (-1.0);
                let v = ladder_rotation(beta, &rep).unwrap();
                let state = StateVector::new(
                    v * StateVector::basis(j, sigma).amplitudes(),
                    j,
                ).unwrap();
                let m = sigma.magnetic_number(j);
                let expect = Vector3::new(
                    theta.sin() * wt.cos(),
                    theta.sin() * wt.sin(),
                    theta.cos(),
                ) * m;
                let got = spin_expectation(&state, &rep);
                prop_assert!((got - expect).norm() < 1e-10);
            }
        }
    }

    /// The moving-frame ket built from path angles agrees with the ladder
    /// rotation evaluated at the same angles.
    #[test]
    fn frame_eigenstate_matches_ladder_route(
        theta in 0.05f64..3.09,
        phi in -7.0f64..7.0,
    ) {
        // helix with rate 1 passes through (theta, phi) at t = phi
        let path = PathSpec::helix(theta, 1.0, 1.0).unwrap();
        for j in [SpinJ::Half, SpinJ::One] {
            let rep = SpinRepresentation::new(j);
            for sigma in [HelicitySign::Plus, HelicitySign::Minus] {
                let fast = frame_eigenstate(&path, sigma, &rep, phi);
                let beta = Complex64::from_polar(theta / 2.0, -phi) * (-1.0);
                let v = ladder_rotation(beta, &rep).unwrap();
                let slow = v * StateVector::basis(j, sigma).amplitudes();
                prop_assert!((fast.amplitudes() - slow).norm() < 1e-12);
            }
        }
    }

    /// Conical initial states are helicity eigenstates of the initial
    /// wave-vector direction.
    #[test]
    fn conditional_state_is_initial_helicity_eigenstate(theta in 0.0f64..PI) {
        for j in [SpinJ::Half, SpinJ::One] {
            let rep = SpinRepresentation::new(j);
            let state = conditional_initial_state(HelicitySign::Plus, theta, &rep).unwrap();
            let k_hat = Vector3::new(theta.sin(), 0.0, theta.cos());
            let h = coilphase::helicity_expectation(&state, k_hat, &rep);
            prop_assert!((h - j.value()).abs() < 1e-12);
        }
    }
}

/// Short random-path propagation keeps the decomposition identity exact and
/// the geometric part on the solid-angle prediction.
#[test]
fn random_path_decomposition_identity() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    for _ in 0..3 {
        let path = PathSpec::Trig(coilphase::random_smooth_path(&mut rng, 1.0));
        let rep = SpinRepresentation::new(SpinJ::One);
        let psi0 = frame_eigenstate(&path, HelicitySign::Plus, &rep, 0.0);
        let field = path.effective_field();
        let t = grid(2.0 * PI, 6283);
        let traj = integrate(&field, &rep, &psi0, &t, &IntegratorOptions::new(1e-3)).unwrap();
        let d = decompose_phases(&traj, &path, HelicitySign::Plus, &rep).unwrap();
        for i in 0..d.times.len() {
            assert_eq!(d.geometric[i], d.total_frame[i] - d.dynamical[i]);
        }
        let sa = solid_angle_phase(&path, 1.0, &t).unwrap();
        let worst = d
            .geometric
            .iter()
            .zip(&sa)
            .map(|(g, s)| (g - s).abs())
            .fold(0.0, f64::max);
        assert!(worst < tol::SAMPLED_PATH_PHASE, "deviation {worst}");
    }
}

/// Wobble paths keep |k| constant and the field orthogonal along the way.
#[test]
fn perfect_guide_assumptions_hold_along_runs() {
    let path = PathSpec::Trig(
        TrigPath::new(1.0, 0.3, 1.2, 0.3, 1.0, 0.4, 0.7, 2.1, 3.5).unwrap(),
    );
    let field = path.effective_field();
    for k in 0..500 {
        let t = 0.05 * k as f64;
        assert!((path.wavevector(t).norm() - 3.5).abs() < 1e-12);
        assert!(field.orthogonality_residual(t) < tol::FIELD_ORTHOGONALITY);
    }
}

//! Phase extraction and decomposition: the frame (total) phase relative to
//! the moving eigenframe, the dynamical phase from the energy expectation,
//! their difference (the noncyclic geometric phase), the solid-angle
//! prediction for arbitrary smooth paths, and the Pancharatnam overlap phase.
//!
//! All phases follow the exp(-i phi) convention.

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::EvolutionResult;
use crate::geometry::{wrap_to_pm_pi, PathSpec};
use crate::spin::{rotation_y_row, HelicitySign, SpinRepresentation, StateVector};
use crate::tol;

/// Unwrap a wrapped angle series by continuity: consecutive output samples
/// differ by less than pi.
pub fn unwrap_phases(wrapped: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(wrapped.len());
    if wrapped.is_empty() {
        return out;
    }
    out.push(wrapped[0]);
    for i in 1..wrapped.len() {
        let delta = wrap_to_pm_pi(wrapped[i] - wrapped[i - 1]);
        out.push(out[i - 1] + delta);
    }
    out
}

/// Total, dynamical, geometric and Pancharatnam phase series on one grid.
#[derive(Clone, Debug)]
pub struct PhaseDecomposition {
    pub times: Vec<f64>,
    /// Phase relative to the moving frame, unwrapped from 0.
    pub total_frame: Vec<f64>,
    /// Cumulative trapezoidal integral of the energy series.
    pub dynamical: Vec<f64>,
    /// total_frame - dynamical, exactly, per sample.
    pub geometric: Vec<f64>,
    /// -arg<psi(0)|psi(t)> wrapped to (-pi, pi]; NaN where the overlap is
    /// too small for the phase to mean anything.
    pub pancharatnam_wrapped: Vec<f64>,
    /// Continuity-unwrapped Pancharatnam series; all-NaN when the overlap
    /// passed through zero somewhere (the unwrapped branch is then undefined).
    pub pancharatnam_unwrapped: Vec<f64>,
    /// False when any sample was near-orthogonal to the initial state.
    pub pancharatnam_defined: bool,
}

/// Phase of a trajectory relative to the moving frame V(t)|sigma>:
/// phi(t_i) = -arg<sigma|V(t_i)' psi(t_i)>, unwrapped by continuity.
///
/// Errors when the overlap modulus drops below the frame threshold, which
/// means the trajectory does not live on this frame (wrong sigma or theta).
pub fn frame_phase(
    traj: &EvolutionResult,
    path: &PathSpec,
    sigma: HelicitySign,
    rep: &SpinRepresentation,
) -> Result<Vec<f64>> {
    let j = rep.j();
    assert_eq!(j, traj.j, "trajectory and representation disagree on j");
    let m_sigma = sigma.magnetic_number(j);
    let row_index = sigma.basis_index(j);
    let m_values = rep.m_values();
    let mut row = [0.0_f64; 3];
    let mut raw = Vec::with_capacity(traj.times.len());
    for (&t, psi) in traj.times.iter().zip(&traj.states) {
        let (theta, phi) = path.angles(t);
        // <sigma|V'(t) psi> = e^{-i m_sigma phi} sum_r d(-theta)[sigma, r] e^{i m_r phi} psi_r
        rotation_y_row(j, -theta, row_index, &mut row);
        let mut s = Complex64::new(0.0, 0.0);
        for (r, &m_r) in m_values.iter().enumerate() {
            s += Complex64::from_polar(1.0, m_r * phi) * psi[r] * row[r];
        }
        let overlap = Complex64::from_polar(1.0, -m_sigma * phi) * s;
        if overlap.norm() < tol::FRAME_OVERLAP_MIN {
            return Err(Error::FrameOverlapLost {
                t,
                overlap: overlap.norm(),
            });
        }
        raw.push(-overlap.arg() + 0.0); // +0.0 normalizes the -0.0 at t = 0
    }
    Ok(unwrap_phases(&raw))
}

/// Cumulative trapezoidal integral of the trajectory's energy series.
pub fn dynamical_phase(traj: &EvolutionResult) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..traj.times.len() {
        let dt = traj.times[i] - traj.times[i - 1];
        acc += 0.5 * (traj.energy[i] + traj.energy[i - 1]) * dt;
        out.push(acc);
    }
    out
}

/// Geometric phase series: total_frame - dynamical, sample-wise.
pub fn geometric_phase(total_frame: &[f64], dynamical: &[f64]) -> Result<Vec<f64>> {
    if total_frame.len() != dynamical.len() {
        return Err(Error::GridMismatch);
    }
    Ok(total_frame
        .iter()
        .zip(dynamical)
        .map(|(t, d)| t - d)
        .collect())
}

/// Full decomposition of a trajectory against its path and helicity label.
pub fn decompose_phases(
    traj: &EvolutionResult,
    path: &PathSpec,
    sigma: HelicitySign,
    rep: &SpinRepresentation,
) -> Result<PhaseDecomposition> {
    let total_frame = frame_phase(traj, path, sigma, rep)?;
    let dynamical = dynamical_phase(traj);
    let geometric = geometric_phase(&total_frame, &dynamical)?;

    let psi0 = &traj.states[0];
    let mut pancharatnam_wrapped = Vec::with_capacity(traj.times.len());
    let mut defined = true;
    for psi in &traj.states {
        let overlap = psi0.dotc(psi);
        if overlap.norm() < tol::PANCHARATNAM_OVERLAP_MIN {
            pancharatnam_wrapped.push(f64::NAN);
            defined = false;
        } else {
            pancharatnam_wrapped.push(wrap_to_pm_pi(-overlap.arg()));
        }
    }
    let pancharatnam_unwrapped = if defined {
        unwrap_phases(&pancharatnam_wrapped)
    } else {
        vec![f64::NAN; pancharatnam_wrapped.len()]
    };

    Ok(PhaseDecomposition {
        times: traj.times.clone(),
        total_frame,
        dynamical,
        geometric,
        pancharatnam_wrapped,
        pancharatnam_unwrapped,
        pancharatnam_defined: defined,
    })
}

/// Predicted geometric phase for an arbitrary smooth path:
/// m * integral of (1 - cos theta(t)) dphi/dt, accumulated on `t_grid` with
/// composite Simpson (midpoint evaluations between grid points).
///
/// Near the poles the (1 - cos theta) factor kills the integrand, so samples
/// with sin(theta) ~ 0 contribute zero regardless of the azimuth rate.
pub fn solid_angle_phase(path: &PathSpec, m: f64, t_grid: &[f64]) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite { what: "m" });
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTimes);
    }
    if let Some((start, end)) = path.domain() {
        let slack = 1e-9 * (end - start);
        if t_grid[0] < start - slack || *t_grid.last().unwrap() > end + slack {
            return Err(Error::DomainExceeded {
                t: *t_grid.last().unwrap(),
                start,
                end,
            });
        }
    }
    let integrand = |t: f64| -> f64 {
        let (theta, _) = path.angles(t);
        if theta.sin().abs() < 1e-9 {
            return 0.0;
        }
        let (_, phi_dot) = path.angle_rates(t);
        m * (1.0 - theta.cos()) * phi_dot
    };
    let mut out = Vec::with_capacity(t_grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    let mut g_left = integrand(t_grid[0]);
    for w in t_grid.windows(2) {
        let h = w[1] - w[0];
        let g_mid = integrand(0.5 * (w[0] + w[1]));
        let g_right = integrand(w[1]);
        acc += h / 6.0 * (g_left + 4.0 * g_mid + g_right);
        out.push(acc);
        g_left = g_right;
    }
    Ok(out)
}

/// Overlap phase -arg<reference|state>; undefined (an error) when the states
/// are near-orthogonal.
pub fn pancharatnam_phase(reference: &StateVector, state: &StateVector) -> Result<f64> {
    let overlap = reference.inner(state);
    if overlap.norm() <= tol::PANCHARATNAM_OVERLAP_MIN {
        return Err(Error::NearOrthogonalStates {
            overlap: overlap.norm(),
        });
    }
    Ok(-overlap.arg())
}

/// <psi| (khat . S) |psi> for a unit direction khat.
pub fn helicity_expectation(
    state: &StateVector,
    k_hat: Vector3<f64>,
    rep: &SpinRepresentation,
) -> f64 {
    assert!(
        (k_hat.norm() - 1.0).abs() <= 1e-12,
        "direction must be a unit vector"
    );
    let op = rep.direction_operator(k_hat);
    let psi = state.amplitudes();
    let val = psi.dotc(&(op * psi));
    debug_assert!(val.im.abs() <= 1e-12, "helicity must be real");
    val.re
}

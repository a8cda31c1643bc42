//! `helix-info`: rotation rates under both conventions, the rotating-frame
//! parameters, and the predicted per-turn geometric phase.

use anyhow::{bail, Result};
use coilphase::{
    helix_gamma, wang_keiji_coefficients, GammaConvention, HelixSpec, SPEED_OF_LIGHT,
};
use std::f64::consts::PI;

use crate::config::{PathSource, RunConfig};
use crate::report::Summary;

pub fn run(config: &RunConfig) -> Result<Summary> {
    let mut s = Summary::default();
    s.push("command", "helix-info");
    s.push("spin", config.spin);

    let (theta, gamma) = match &config.source {
        PathSource::HelixPhysical {
            pitch,
            radius,
            index,
            handedness,
            theta_override,
        } => {
            let spec = HelixSpec::new(*pitch, *radius, *index, *handedness, config.k_mag)?;
            let gamma_paper = helix_gamma(&spec, SPEED_OF_LIGHT, GammaConvention::Paper);
            let gamma_derived = helix_gamma(&spec, SPEED_OF_LIGHT, GammaConvention::Derived);
            let gamma_used = match config.gamma_convention {
                GammaConvention::Paper => gamma_paper,
                GammaConvention::Derived => gamma_derived,
            };
            let theta_derived = spec.theta_derived();
            let theta_used = theta_override.unwrap_or(theta_derived);
            s.push("source", "physical");
            s.push("pitch", pitch);
            s.push("radius", radius);
            s.push("index", index);
            s.push("handedness", handedness.sign() as i64);
            s.push("gamma_paper", gamma_paper);
            s.push("gamma_derived", gamma_derived);
            s.push("gamma_convention", config.gamma_convention);
            s.push("gamma_used", gamma_used);
            s.push("theta_derived", theta_derived);
            s.push("theta_used", theta_used);
            (theta_used, gamma_used)
        }
        PathSource::HelixAngles { theta, gamma } => {
            s.push("source", "angles");
            s.push("theta", theta);
            s.push("gamma", gamma);
            (*theta, *gamma)
        }
        PathSource::File(_) => bail!("helix-info needs helix parameters, not a path file"),
        PathSource::None => bail!("helix-info needs helix parameters"),
    };

    let (omega1, omega0, residual) = wang_keiji_coefficients(theta, gamma);
    let (st, ct) = theta.sin_cos();
    let degenerate = st.abs() < 1e-12 || ct.abs() < 1e-12;
    s.push("omega1", omega1);
    s.push("omega0", omega0);
    s.push("wang_keiji_residual", residual);
    s.push(
        "wang_keiji_residual_relative",
        if gamma != 0.0 {
            residual.abs() / (gamma * gamma)
        } else {
            f64::NAN
        },
    );
    s.push("wang_keiji_decomposition", if degenerate { "degenerate" } else { "ok" });

    // per-turn geometric phase m * sign(gamma) * 2 pi (1 - cos theta)
    let per_turn = 2.0 * PI * (1.0 - ct) * gamma.signum();
    let j = config.spin.value();
    s.push("per_turn_geometric_phase_sigma_plus", j * per_turn);
    s.push("per_turn_geometric_phase_sigma_minus", -j * per_turn);
    Ok(s)
}

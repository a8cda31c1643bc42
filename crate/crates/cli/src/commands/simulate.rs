//! `simulate`: propagate one run, decompose its phases, and write the
//! trajectory, phase and summary files.

use std::f64::consts::PI;
use anyhow::{bail, Context, Result};
use coilphase::{
    decompose_phases, frame_eigenstate, helix_gamma, integrate, read_path_file,
    solid_angle_phase, ClosedFormSolution, GammaConvention, HelixSpec, IntegratorOptions,
    PathSpec, SpinRepresentation, SPEED_OF_LIGHT,
};

use crate::config::{PathSource, RunConfig};
use crate::report::{write_phases, write_trajectory, Summary};

enum RunKind {
    Helix { theta: f64, gamma: f64 },
    File,
}

pub fn run(config: &RunConfig) -> Result<Summary> {
    let mut s = Summary::default();
    s.push("command", "simulate");

    let (path, kind) = resolve_path(config, &mut s)?;
    let rep = SpinRepresentation::new(config.spin);
    let m = config.sigma.magnetic_number(config.spin);
    s.push("spin", config.spin);
    s.push("sigma", config.sigma);
    s.push("m", m);
    s.push("sigma_normalized", m / config.spin.value());
    s.push("k_mag", config.k_mag);

    // time grid: helix runs cover `periods` turns at steps_per_period steps
    // each; file runs cover the sampled span at half the median sample
    // spacing (clipped by duration_seconds if given)
    let (t0, t_end, step) = match &kind {
        RunKind::Helix { gamma, .. } => {
            if *gamma == 0.0 && config.duration_seconds.is_none() {
                bail!("gamma = 0 has no period; give duration_seconds");
            }
            let duration = match config.duration_seconds {
                Some(d) => d,
                None => config.periods * 2.0 * PI / gamma.abs(),
            };
            let step = if *gamma == 0.0 {
                duration / config.steps_per_period as f64
            } else {
                2.0 * PI / gamma.abs() / config.steps_per_period as f64
            };
            (0.0, duration, step)
        }
        RunKind::File => {
            let (start, end) = path.domain().expect("file paths are sampled");
            let span = end - start;
            let duration = config.duration_seconds.unwrap_or(span).min(span);
            let spacing = if let PathSpec::Sampled(p) = &path {
                median_spacing(p.times())
            } else {
                unreachable!()
            };
            (start, start + duration, 0.5 * spacing)
        }
    };
    let n_steps = ((t_end - t0) / step).round().max(1.0) as usize;
    let t_grid: Vec<f64> = (0..=n_steps)
        .map(|i| t0 + (t_end - t0) * i as f64 / n_steps as f64)
        .collect();
    s.push("t_start", t0);
    s.push("t_end", t_end);
    s.push("steps", n_steps);
    s.push("step", (t_end - t0) / n_steps as f64);

    let field = path.effective_field();
    let psi0 = frame_eigenstate(&path, config.sigma, &rep, t0);
    let opts = IntegratorOptions {
        norm_tolerance: config.tol_norm_drift,
        ..IntegratorOptions::new(step)
    };
    let traj = integrate(&field, &rep, &psi0, &t_grid, &opts)?;
    if let Some(w) = &traj.step_warning {
        eprintln!("warning: {w}");
        s.push("step_warning", w);
    }
    let phases = decompose_phases(&traj, &path, config.sigma, &rep)?;

    s.push("final_time", *traj.times.last().unwrap());
    s.push("phase_total_final", *phases.total_frame.last().unwrap());
    s.push("phase_dynamical_final", *phases.dynamical.last().unwrap());
    s.push("phase_geometric_final", *phases.geometric.last().unwrap());
    s.push(
        "pancharatnam_final",
        *phases.pancharatnam_wrapped.last().unwrap(),
    );

    // prediction: the linear law for helices, the solid-angle quadrature for
    // sampled paths
    let predicted = match &kind {
        RunKind::Helix { theta, gamma } => m * gamma * (1.0 - theta.cos()) * (t_end - t0),
        RunKind::File => *solid_angle_phase(&path, m, &t_grid)?.last().unwrap(),
    };
    s.push("predicted_geometric_final", predicted);
    s.push(
        "geometric_deviation",
        (phases.geometric.last().unwrap() - predicted).abs(),
    );

    if let RunKind::Helix { theta, gamma } = &kind {
        let oracle = ClosedFormSolution::new(config.sigma, *theta, *gamma, &rep)?;
        let dev = traj
            .times
            .iter()
            .zip(&traj.states)
            .map(|(t, psi)| (psi - oracle.state_at(*t).state.amplitudes()).norm())
            .fold(0.0, f64::max);
        s.push("closed_form_max_deviation", dev);
    }

    s.push("helicity_initial", traj.helicity[0]);
    s.push("helicity_final", *traj.helicity.last().unwrap());
    s.push("helicity_drift", traj.helicity_drift());
    s.push("helicity_tolerance", config.tol_helicity);
    if traj.helicity_drift() > config.tol_helicity {
        eprintln!(
            "warning: helicity drift {:.3e} exceeds tolerance {:.1e}",
            traj.helicity_drift(),
            config.tol_helicity
        );
    }
    s.push("norm_drift", traj.norm_drift);
    s.push("norm_tolerance", config.tol_norm_drift);
    s.push("pancharatnam_defined", phases.pancharatnam_defined);

    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    write_trajectory(
        &config.out.join("trajectory.csv"),
        &traj,
        &phases,
        &rep,
        config.record_every,
    )?;
    write_phases(&config.out.join("phases.csv"), &phases, config.record_every)?;
    std::fs::write(config.out.join("summary.txt"), s.render())
        .with_context(|| format!("writing summary into {}", config.out.display()))?;
    Ok(s)
}

fn resolve_path(config: &RunConfig, s: &mut Summary) -> Result<(PathSpec, RunKind)> {
    match &config.source {
        PathSource::HelixAngles { theta, gamma } => {
            s.push("source", "helix");
            s.push("theta", theta);
            s.push("gamma", gamma);
            let path = PathSpec::helix(*theta, *gamma, config.k_mag)?;
            Ok((
                path,
                RunKind::Helix {
                    theta: *theta,
                    gamma: *gamma,
                },
            ))
        }
        PathSource::HelixPhysical {
            pitch,
            radius,
            index,
            handedness,
            theta_override,
        } => {
            let spec = HelixSpec::new(*pitch, *radius, *index, *handedness, config.k_mag)?;
            let gamma = helix_gamma(&spec, SPEED_OF_LIGHT, config.gamma_convention);
            let theta = match (theta_override, config.gamma_convention) {
                (Some(t), _) => *t,
                (None, GammaConvention::Derived) => spec.theta_derived(),
                (None, GammaConvention::Paper) => bail!(
                    "the paper gamma convention leaves theta free; pass --theta (or switch to --gamma-convention derived)"
                ),
            };
            s.push("source", "physical");
            s.push("pitch", pitch);
            s.push("radius", radius);
            s.push("index", index);
            s.push("handedness", handedness.sign() as i64);
            s.push("gamma_convention", config.gamma_convention);
            s.push("theta", theta);
            s.push("gamma", gamma);
            let path = PathSpec::helix(theta, gamma, config.k_mag)?;
            Ok((path, RunKind::Helix { theta, gamma }))
        }
        PathSource::File(file) => {
            s.push("source", "file");
            s.push("path_file", file.display());
            let path = read_path_file(file, config.k_mag)?;
            Ok((path, RunKind::File))
        }
        PathSource::None => bail!("simulate needs a path source"),
    }
}

fn median_spacing(times: &[f64]) -> f64 {
    let mut gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    gaps[gaps.len() / 2]
}

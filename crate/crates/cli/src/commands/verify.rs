//! `verify`: the built-in invariant sweep. Every check lands in a
//! machine-readable report; the exit code is 0 only if all of them hold.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use anyhow::{Context, Result};
use coilphase::{
    check_motion_identity, decompose_phases, dynamical_phase, frame_eigenstate, helix_gamma,
    integrate, parse_path_text, random_smooth_path, solid_angle_phase, tol, wang_keiji_decompose,
    wrap_to_pm_pi, ClosedFormSolution, EffectiveField, GammaConvention, Handedness, HelicitySign,
    HelixSpec, IntegratorOptions, PathSpec, SampledPath, SpinJ, SpinRepresentation,
    SPEED_OF_LIGHT,
};
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;

const SWEEP_THETA: [f64; 4] = [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.5];
const SWEEP_GAMMA: [f64; 3] = [0.5, 1.0, 2.0];
const SWEEP_SIGMA: [HelicitySign; 2] = [HelicitySign::Plus, HelicitySign::Minus];
const SWEEP_SPIN: [SpinJ; 2] = [SpinJ::Half, SpinJ::One];
const PERIODS: f64 = 10.0;

/// Direction of a check: measured value must stay below the threshold, or
/// (for negative controls) must exceed it.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Sense {
    Below,
    Above,
}

#[derive(Clone, Debug, Serialize)]
struct CheckRow {
    name: String,
    params: BTreeMap<String, String>,
    value: f64,
    threshold: f64,
    sense: Sense,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    suite: &'static str,
    seed: u64,
    periods: f64,
    steps_per_period: usize,
    checks: Vec<CheckRow>,
    failed: usize,
    passed: bool,
}

struct Checks(Vec<CheckRow>);

impl Checks {
    fn push(&mut self, name: &str, params: &[(&str, String)], value: f64, threshold: f64, sense: Sense) {
        let pass = match sense {
            Sense::Below => value < threshold,
            Sense::Above => value > threshold,
        };
        self.0.push(CheckRow {
            name: name.to_string(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
            value,
            threshold,
            sense,
            pass,
        });
    }
}

pub fn run(config: &RunConfig) -> Result<i32> {
    let mut checks = Checks(Vec::new());
    let n = config.steps_per_period;

    helix_sweep(&mut checks, n);
    random_path_checks(&mut checks, config.seed, n);
    convention_independence(&mut checks);
    mutation_control(&mut checks, n);
    ingestion_round_trip(&mut checks, n);

    let failed = checks.0.iter().filter(|c| !c.pass).count();
    let report = VerifyReport {
        suite: "coilphase-verify",
        seed: config.seed,
        periods: PERIODS,
        steps_per_period: n,
        checks: checks.0,
        failed,
        passed: failed == 0,
    };

    for c in &report.checks {
        let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let rel = match c.sense {
            Sense::Below => "<",
            Sense::Above => ">",
        };
        println!(
            "{} {} [{}] value={:e} {} {:e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            params.join(" "),
            c.value,
            rel,
            c.threshold
        );
    }
    println!(
        "verify: {} checks, {} failed",
        report.checks.len(),
        report.failed
    );

    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(config.out.join("report.json"), json + "\n")
        .with_context(|| format!("writing report into {}", config.out.display()))?;

    Ok(if report.passed { 0 } else { 1 })
}

fn grid(t0: f64, t_end: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t0 + (t_end - t0) * i as f64 / n as f64).collect()
}

fn helix_sweep(checks: &mut Checks, steps_per_period: usize) {
    for &theta in &SWEEP_THETA {
        for &gamma in &SWEEP_GAMMA {
            let pair: &[(&str, String)] = &[
                ("theta", format!("{theta:.6}")),
                ("gamma", gamma.to_string()),
            ];
            let wk = wang_keiji_decompose(theta, gamma).expect("sweep angles are non-degenerate");
            checks.push(
                "wang_keiji_residual_relative",
                pair,
                wk.residual.abs() / (gamma * gamma),
                tol::WANG_KEIJI_RESIDUAL,
                Sense::Below,
            );

            let path = PathSpec::helix(theta, gamma, 1.0).unwrap();
            let period = 2.0 * PI / gamma;
            let t = grid(0.0, PERIODS * period, 2000);
            let motion = check_motion_identity(&path, &t);
            checks.push(
                "motion_identity_residual",
                pair,
                motion.max_residual,
                tol::MOTION_IDENTITY,
                Sense::Below,
            );

            for &sigma in &SWEEP_SIGMA {
                for &j in &SWEEP_SPIN {
                    sweep_point(checks, theta, gamma, sigma, j, steps_per_period);
                }
            }
        }
    }
}

fn sweep_point(
    checks: &mut Checks,
    theta: f64,
    gamma: f64,
    sigma: HelicitySign,
    j: SpinJ,
    steps_per_period: usize,
) {
    let params: &[(&str, String)] = &[
        ("theta", format!("{theta:.6}")),
        ("gamma", gamma.to_string()),
        ("sigma", sigma.to_string()),
        ("spin", j.to_string()),
    ];
    let rep = SpinRepresentation::new(j);
    let path = PathSpec::helix(theta, gamma, 1.0).unwrap();
    let field = path.effective_field();
    let psi0 = frame_eigenstate(&path, sigma, &rep, 0.0);
    let period = 2.0 * PI / gamma;
    let step = period / steps_per_period as f64;
    let n_steps = (PERIODS * steps_per_period as f64) as usize;
    let t = grid(0.0, PERIODS * period, n_steps);
    let traj = integrate(&field, &rep, &psi0, &t, &IntegratorOptions::strict(step))
        .expect("sweep step is well inside the stability budget");

    let oracle = ClosedFormSolution::new(sigma, theta, gamma, &rep).unwrap();
    let oracle_dev = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(tk, s)| (s - oracle.state_at(*tk).state.amplitudes()).norm())
        .fold(0.0, f64::max);
    checks.push("oracle_equivalence", params, oracle_dev, tol::ORACLE_STATE, Sense::Below);

    let decomp = decompose_phases(&traj, &path, sigma, &rep).expect("frame stays resolved");
    let dyn_rate = max_dynamical_rate(&traj.times, &decomp.dynamical, gamma);
    checks.push(
        "dynamical_phase_rate",
        params,
        dyn_rate,
        tol::DYNAMICAL_PHASE_RATE,
        Sense::Below,
    );

    checks.push(
        "helicity_drift",
        params,
        traj.helicity_drift(),
        tol::HELICITY_DRIFT,
        Sense::Below,
    );

    let m = sigma.magnetic_number(j);
    let slope = m * gamma * (1.0 - theta.cos());
    let law_dev = traj
        .times
        .iter()
        .zip(&decomp.geometric)
        .map(|(tk, g)| (g - slope * tk).abs())
        .fold(0.0, f64::max);
    checks.push(
        "geometric_phase_law",
        params,
        law_dev,
        tol::GEOMETRIC_PHASE_ABS,
        Sense::Below,
    );

    // wrapped Pancharatnam equals the wrapped frame phase at whole turns
    let mut cycle_dev = 0.0_f64;
    for q in 1..=(PERIODS as usize) {
        let i = q * steps_per_period;
        let d = wrap_to_pm_pi(decomp.pancharatnam_wrapped[i] - wrap_to_pm_pi(decomp.total_frame[i]));
        cycle_dev = cycle_dev.max(d.abs());
    }
    checks.push(
        "pancharatnam_frame_full_cycle",
        params,
        cycle_dev,
        tol::GEOMETRIC_PHASE_ABS,
        Sense::Below,
    );
}

fn max_dynamical_rate(times: &[f64], dynamical: &[f64], gamma: f64) -> f64 {
    times
        .iter()
        .zip(dynamical)
        .skip(1)
        .map(|(t, d)| d.abs() / (gamma.abs() * t))
        .fold(0.0, f64::max)
}

/// Arbitrary smooth theta(t), phi(t): the dynamical phase still vanishes,
/// helicity still holds, and the geometric phase follows the solid angle.
fn random_path_checks(checks: &mut Checks, seed: u64, steps_per_period: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rate = 1.0;
    for index in 0..6 {
        let trig = random_smooth_path(&mut rng, rate);
        let path = PathSpec::Trig(trig);
        let sigma = if index % 2 == 0 { HelicitySign::Plus } else { HelicitySign::Minus };
        let j = if index % 3 == 0 { SpinJ::Half } else { SpinJ::One };
        let params: &[(&str, String)] = &[
            ("path", format!("random-{index}")),
            ("sigma", sigma.to_string()),
            ("spin", j.to_string()),
        ];
        let rep = SpinRepresentation::new(j);
        let field = path.effective_field();
        let psi0 = frame_eigenstate(&path, sigma, &rep, 0.0);
        let period = 2.0 * PI / rate;
        let step = period / steps_per_period as f64;
        let t = grid(0.0, PERIODS * period, (PERIODS * steps_per_period as f64) as usize);
        let traj = integrate(&field, &rep, &psi0, &t, &IntegratorOptions::strict(step)).unwrap();
        let decomp = decompose_phases(&traj, &path, sigma, &rep).unwrap();
        checks.push(
            "dynamical_phase_rate",
            params,
            max_dynamical_rate(&traj.times, &decomp.dynamical, rate),
            tol::DYNAMICAL_PHASE_RATE,
            Sense::Below,
        );
        checks.push(
            "helicity_drift",
            params,
            traj.helicity_drift(),
            tol::HELICITY_DRIFT,
            Sense::Below,
        );
        let sa = solid_angle_phase(&path, sigma.magnetic_number(j), &t).unwrap();
        let sa_dev = decomp
            .geometric
            .iter()
            .zip(&sa)
            .map(|(g, s)| (g - s).abs())
            .fold(0.0, f64::max);
        checks.push(
            "geometric_vs_solid_angle",
            params,
            sa_dev,
            tol::SAMPLED_PATH_PHASE,
            Sense::Below,
        );

        // tabulated variant of the first two paths over two base periods
        if index < 2 {
            let params: &[(&str, String)] = &[
                ("path", format!("random-{index}-sampled")),
                ("sigma", sigma.to_string()),
                ("spin", j.to_string()),
            ];
            let n_samp = 2 * 30_000;
            let t_end = 2.0 * period;
            let times: Vec<f64> = (0..=n_samp).map(|k| t_end * k as f64 / n_samp as f64).collect();
            let (theta, phi): (Vec<f64>, Vec<f64>) =
                times.iter().map(|&tk| path.angles(tk)).unzip();
            let sampled =
                PathSpec::Sampled(SampledPath::new(times, theta, phi, 1.0).unwrap());
            let f2 = sampled.effective_field();
            let p0 = frame_eigenstate(&sampled, sigma, &rep, 0.0);
            let t2 = grid(0.0, t_end, 2 * steps_per_period);
            let traj2 = integrate(&f2, &rep, &p0, &t2, &IntegratorOptions::strict(step)).unwrap();
            let d2 = decompose_phases(&traj2, &sampled, sigma, &rep).unwrap();
            let sa2 = solid_angle_phase(&sampled, sigma.magnetic_number(j), &t2).unwrap();
            let dev = d2
                .geometric
                .iter()
                .zip(&sa2)
                .map(|(g, s)| (g - s).abs())
                .fold(0.0, f64::max);
            checks.push(
                "geometric_vs_solid_angle",
                params,
                dev,
                tol::SAMPLED_PATH_PHASE,
                Sense::Below,
            );
            checks.push(
                "helicity_drift",
                params,
                traj2.helicity_drift(),
                tol::HELICITY_DRIFT,
                Sense::Below,
            );
        }
    }
}

/// The parameter relation is a function of (theta, gamma) alone, so it holds
/// under either printed-gamma convention for the same physical helix.
fn convention_independence(checks: &mut Checks) {
    let spec = HelixSpec::new(0.02, 0.001, 1.5, Handedness::Right, 1.0).unwrap();
    let theta = spec.theta_derived();
    for convention in [GammaConvention::Paper, GammaConvention::Derived] {
        let gamma = helix_gamma(&spec, SPEED_OF_LIGHT, convention);
        let wk = wang_keiji_decompose(theta, gamma).unwrap();
        checks.push(
            "wang_keiji_residual_relative",
            &[
                ("gamma_convention", convention.to_string()),
                ("gamma", format!("{gamma:.6e}")),
            ],
            wk.residual.abs() / (gamma * gamma),
            tol::WANG_KEIJI_RESIDUAL,
            Sense::Below,
        );
    }
}

/// Negative control: a deliberately corrupted Hamiltonian (an extra
/// 1e-3 gamma Sz term) must trip the dynamical-phase check.
fn mutation_control(checks: &mut Checks, steps_per_period: usize) {
    let (theta, gamma) = (PI / 4.0, 1.0);
    let rep = SpinRepresentation::new(SpinJ::One);
    let path = PathSpec::helix(theta, gamma, 1.0).unwrap();
    let field = EffectiveField::new(&path).with_bias(Vector3::new(0.0, 0.0, 1e-3 * gamma));
    let psi0 = frame_eigenstate(&path, HelicitySign::Plus, &rep, 0.0);
    let period = 2.0 * PI / gamma;
    let t = grid(0.0, PERIODS * period, (PERIODS * steps_per_period as f64) as usize);
    let traj = integrate(
        &field,
        &rep,
        &psi0,
        &t,
        &IntegratorOptions::strict(period / steps_per_period as f64),
    )
    .unwrap();
    let dynamical = dynamical_phase(&traj);
    checks.push(
        "mutation_detected_by_dynamical_phase",
        &[("bias", "1e-3 gamma Sz".to_string())],
        max_dynamical_rate(&traj.times, &dynamical, gamma),
        tol::DYNAMICAL_PHASE_RATE,
        Sense::Above,
    );
}

/// A helix written through the Cartesian file format reproduces the analytic
/// geometric phase.
fn ingestion_round_trip(checks: &mut Checks, steps_per_period: usize) {
    let (theta, gamma): (f64, f64) = (PI / 3.0, 1.0);
    let rep = SpinRepresentation::new(SpinJ::One);
    let period = 2.0 * PI / gamma;
    let step = period / steps_per_period as f64;
    let t = grid(0.0, period, steps_per_period);

    let path = PathSpec::helix(theta, gamma, 1.0).unwrap();
    let traj = integrate(
        &path.effective_field(),
        &rep,
        &frame_eigenstate(&path, HelicitySign::Plus, &rep, 0.0),
        &t,
        &IntegratorOptions::strict(step),
    )
    .unwrap();
    let geo_analytic = *decompose_phases(&traj, &path, HelicitySign::Plus, &rep)
        .unwrap()
        .geometric
        .last()
        .unwrap();

    let mut text = String::from("t,x,y,z\n");
    let st = theta.sin();
    for i in 0..=10_000usize {
        let tk = period * i as f64 / 10_000.0;
        text.push_str(&format!(
            "{},{},{},{}\n",
            tk,
            st / gamma * (gamma * tk).sin(),
            -st / gamma * (gamma * tk).cos(),
            theta.cos() * tk
        ));
    }
    let ingested = parse_path_text(&text, 1.0).unwrap();
    let traj2 = integrate(
        &ingested.effective_field(),
        &rep,
        &frame_eigenstate(&ingested, HelicitySign::Plus, &rep, 0.0),
        &t,
        &IntegratorOptions::strict(step),
    )
    .unwrap();
    let geo_ingested = *decompose_phases(&traj2, &ingested, HelicitySign::Plus, &rep)
        .unwrap()
        .geometric
        .last()
        .unwrap();

    checks.push(
        "ingestion_round_trip",
        &[("samples_per_period", "10000".to_string())],
        (geo_ingested - geo_analytic).abs(),
        tol::SAMPLED_PATH_PHASE,
        Sense::Below,
    );
}

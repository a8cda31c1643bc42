//! Command-line front end: configure runs, execute simulations and the
//! verification sweep, export trajectories and phase reports.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage/config error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod report;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "coilphase",
    version,
    about = "Geometric phase of polarized light in coiled fiber guides"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print helix rates, rotating-frame parameters and the per-turn phase
    HelixInfo(RunArgs),
    /// Propagate one run and write trajectory, phase and summary files
    Simulate(RunArgs),
    /// Run the built-in invariant sweep and write a machine-readable report
    Verify(RunArgs),
}

#[derive(Args)]
pub struct RunArgs {
    /// Flat key=value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Polar angle of the wave vector (radians; `deg` suffix accepted)
    #[arg(long)]
    theta: Option<String>,
    /// Azimuthal rotation rate in rad/s
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Helix pitch length in meters
    #[arg(long)]
    pitch: Option<f64>,
    /// Helix radius in meters
    #[arg(long)]
    radius: Option<f64>,
    /// Refractive index of the guide
    #[arg(long)]
    index: Option<f64>,
    /// Winding sense, +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    handedness: Option<i32>,
    /// Helicity label of the initial state, +1 or -1
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Spin quantum number, 1 or 1/2
    #[arg(long)]
    spin: Option<String>,
    /// Run duration in rotation periods
    #[arg(long)]
    periods: Option<f64>,
    /// Internal integrator steps per rotation period (>= 100)
    #[arg(long)]
    steps_per_period: Option<usize>,
    /// Sampled path file with header t,x,y,z or t,theta,phi
    #[arg(long)]
    path_file: Option<PathBuf>,
    /// Which printed helix-rate form to use: paper or derived
    #[arg(long)]
    gamma_convention: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::HelixInfo(args) => {
            let config = RunConfig::from_args(&args, true)?;
            let summary = commands::helix_info::run(&config)?;
            print!("{}", summary.render());
            Ok(0)
        }
        Command::Simulate(args) => {
            let config = RunConfig::from_args(&args, true)?;
            let summary = commands::simulate::run(&config)?;
            print!("{}", summary.render());
            Ok(0)
        }
        Command::Verify(args) => {
            let config = RunConfig::from_args(&args, false)?;
            Ok(commands::verify::run(&config)? as u8)
        }
    }
}

/// Input and configuration problems exit 2; numeric check failures exit 1.
fn classify(e: &anyhow::Error) -> u8 {
    use coilphase::Error as E;
    match e.downcast_ref::<E>() {
        Some(
            E::StepTooLarge { .. }
            | E::NormDrift { .. }
            | E::FrameOverlapLost { .. }
            | E::NearOrthogonalStates { .. }
            | E::GridMismatch
            | E::NotNormalized { .. }
            | E::NotAntiHermitian { .. },
        ) => 1,
        _ => 2,
    }
}

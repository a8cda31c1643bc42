//! Plain-text outputs: ordered key = value summaries and the trajectory /
//! phase CSV files. Floats print in shortest round-trip form so identical
//! runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use coilphase::{EvolutionResult, PhaseDecomposition, SpinRepresentation};

/// Ordered key = value document.
#[derive(Default)]
pub struct Summary {
    lines: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

fn m_label(m: f64) -> String {
    let half = (2.0 * m).round() as i64;
    if half % 2 == 0 {
        format!("{:+}", half / 2)
    } else {
        format!("{:+}/2", half)
    }
    .replace("+0", "0")
}

/// Trajectory rows: t, per-m real/imaginary amplitudes, helicity, norm and
/// the three phase series, thinned by `record_every` (last row always kept).
pub fn write_trajectory(
    path: &Path,
    traj: &EvolutionResult,
    phases: &PhaseDecomposition,
    rep: &SpinRepresentation,
    record_every: usize,
) -> Result<()> {
    let mut out = String::from("t");
    for &m in rep.m_values() {
        let label = m_label(m);
        let _ = write!(out, ",re_m{label},im_m{label}");
    }
    out.push_str(",helicity,norm,phase_total,phase_dyn,phase_geo\n");

    let n = traj.times.len();
    let mut rows: Vec<usize> = (0..n).step_by(record_every).collect();
    if *rows.last().unwrap() != n - 1 {
        rows.push(n - 1);
    }
    for i in rows {
        let _ = write!(out, "{}", traj.times[i]);
        for amp in traj.states[i].iter() {
            let _ = write!(out, ",{},{}", amp.re, amp.im);
        }
        let _ = writeln!(
            out,
            ",{},{},{},{},{}",
            traj.helicity[i],
            traj.norms[i],
            phases.total_frame[i],
            phases.dynamical[i],
            phases.geometric[i]
        );
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn write_phases(path: &Path, phases: &PhaseDecomposition, record_every: usize) -> Result<()> {
    let mut out =
        String::from("t,phase_total,phase_dyn,phase_geo,pancharatnam_wrapped,pancharatnam_unwrapped\n");
    let n = phases.times.len();
    let mut rows: Vec<usize> = (0..n).step_by(record_every).collect();
    if *rows.last().unwrap() != n - 1 {
        rows.push(n - 1);
    }
    for i in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            phases.times[i],
            phases.total_frame[i],
            phases.dynamical[i],
            phases.geometric[i],
            phases.pancharatnam_wrapped[i],
            phases.pancharatnam_unwrapped[i]
        );
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

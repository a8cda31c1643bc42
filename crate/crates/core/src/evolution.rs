//! The time-dependent spin Hamiltonian H(t) = b(t) . S, its rotating-frame
//! (Wang-Keiji) parameterization, a fixed-step RK4 propagator, and the exact
//! closed-form solution used as an independent oracle.
//!
//! Phase convention: a state with phase phi carries the factor exp(-i phi).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{EffectiveField, PathSpec};
use crate::spin::{
    direction_operator_into, rotation_y_row, HelicitySign, SpinJ, SpinRepresentation, StateVector,
};
use crate::tol;

/// Parameters of the rotating-field Hamiltonian
/// w1 (cos(gamma t) Sx + sin(gamma t) Sy) + (w0 + gamma) Sz,
/// with theta = arctan(w1/w0) and the stored residual of the requirement
/// w1^2 + w0^2 + gamma w0 = 0.
#[derive(Clone, Copy, Debug)]
pub struct WangKeijiParams {
    pub omega1: f64,
    pub omega0: f64,
    pub gamma: f64,
    pub theta: f64,
    pub residual: f64,
}

impl WangKeijiParams {
    /// Quadrant-aware recovery of theta from (w1, w0); lands in (0, pi).
    pub fn theta_recovered(&self) -> f64 {
        let a = self.omega1.atan2(self.omega0);
        if a <= 0.0 {
            a + PI
        } else {
            a
        }
    }
}

/// Rotating-frame coefficients of the helix Hamiltonian
/// H = -gamma sin(theta) cos(theta) (cos(gamma t) Sx + sin(gamma t) Sy) + gamma sin^2(theta) Sz:
/// returns (w1, w0, residual) with w1 = -gamma sin(theta) cos(theta),
/// w0 = -gamma cos^2(theta). Total on all inputs; the residual is evaluated
/// literally, not algebraically cancelled.
pub fn wang_keiji_coefficients(theta: f64, gamma: f64) -> (f64, f64, f64) {
    let (st, ct) = theta.sin_cos();
    let omega1 = -gamma * st * ct;
    let omega0 = -gamma * ct * ct;
    let residual = omega1 * omega1 + omega0 * omega0 + gamma * omega0;
    (omega1, omega0, residual)
}

/// Match the helix Hamiltonian against the rotating-field form. Degenerate
/// at theta in {0, pi/2, pi} where arctan(w1/w0) loses meaning.
pub fn wang_keiji_decompose(theta: f64, gamma: f64) -> Result<WangKeijiParams> {
    if !gamma.is_finite() || gamma == 0.0 {
        return Err(Error::InvalidRotationRate);
    }
    if !theta.is_finite() || theta <= 0.0 || theta >= PI {
        return Err(Error::DegenerateTheta { theta });
    }
    let (st, ct) = theta.sin_cos();
    if st.abs() < 1e-12 || ct.abs() < 1e-12 {
        return Err(Error::DegenerateTheta { theta });
    }
    let (omega1, omega0, residual) = wang_keiji_coefficients(theta, gamma);
    Ok(WangKeijiParams {
        omega1,
        omega0,
        gamma,
        theta,
        residual,
    })
}

/// H(t) = b(t) . S for the given field and representation.
pub fn hamiltonian_at(
    field: &EffectiveField,
    rep: &SpinRepresentation,
    t: f64,
) -> DMatrix<Complex64> {
    let dim = rep.dim();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    direction_operator_into(&mut out, rep, field.value(t));
    out
}

/// Knobs of the fixed-step propagator.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorOptions {
    /// Internal step; grid intervals are subdivided to not exceed it.
    pub step: f64,
    /// Hard budget on max |norm - 1| over the run.
    pub norm_tolerance: f64,
    /// Escalate the local-truncation warning to an error (verify mode).
    pub strict_step_check: bool,
}

impl IntegratorOptions {
    pub fn new(step: f64) -> Self {
        Self {
            step,
            norm_tolerance: tol::NORM_DRIFT,
            strict_step_check: false,
        }
    }

    pub fn strict(step: f64) -> Self {
        Self {
            strict_step_check: true,
            ..Self::new(step)
        }
    }
}

/// Recorded trajectory of one propagation.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<DVector<Complex64>>,
    /// <psi | khat(t) . S | psi> at each grid time.
    pub helicity: Vec<f64>,
    /// <psi | H(t) | psi> at each grid time (rad/s).
    pub energy: Vec<f64>,
    pub norms: Vec<f64>,
    /// max |norm - 1| over the grid.
    pub norm_drift: f64,
    pub j: SpinJ,
    /// Set when the estimated local truncation exceeded the limit in
    /// non-strict mode.
    pub step_warning: Option<String>,
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// max |h(t) - h(0)| over the grid.
    pub fn helicity_drift(&self) -> f64 {
        let h0 = self.helicity[0];
        self.helicity
            .iter()
            .map(|h| (h - h0).abs())
            .fold(0.0, f64::max)
    }

    pub fn state_at(&self, i: usize) -> StateVector {
        StateVector::new(self.states[i].clone(), self.j).expect("trajectory states stay normalized")
    }

    pub fn final_state(&self) -> StateVector {
        self.state_at(self.states.len() - 1)
    }
}

struct Rk4Workspace {
    k1: DVector<Complex64>,
    k2: DVector<Complex64>,
    k3: DVector<Complex64>,
    k4: DVector<Complex64>,
    stage: DVector<Complex64>,
    ham: DMatrix<Complex64>,
}

impl Rk4Workspace {
    fn new(dim: usize) -> Self {
        Self {
            k1: DVector::zeros(dim),
            k2: DVector::zeros(dim),
            k3: DVector::zeros(dim),
            k4: DVector::zeros(dim),
            stage: DVector::zeros(dim),
            ham: DMatrix::zeros(dim, dim),
        }
    }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn rhs(
    field: &EffectiveField,
    rep: &SpinRepresentation,
    t: f64,
    y: &DVector<Complex64>,
    ham: &mut DMatrix<Complex64>,
    out: &mut DVector<Complex64>,
) {
    direction_operator_into(ham, rep, field.value(t));
    ham.mul_to(y, out);
    for z in out.iter_mut() {
        *z *= Complex64::new(0.0, -1.0); // i dpsi/dt = H psi
    }
}

fn rk4_step(
    field: &EffectiveField,
    rep: &SpinRepresentation,
    psi: &mut DVector<Complex64>,
    t: f64,
    h: f64,
    ws: &mut Rk4Workspace,
) {
    let h2 = Complex64::new(0.5 * h, 0.0);
    let hc = Complex64::new(h, 0.0);
    rhs(field, rep, t, psi, &mut ws.ham, &mut ws.k1);
    ws.stage.copy_from(psi);
    ws.stage.axpy(h2, &ws.k1, ONE);
    rhs(field, rep, t + 0.5 * h, &ws.stage, &mut ws.ham, &mut ws.k2);
    ws.stage.copy_from(psi);
    ws.stage.axpy(h2, &ws.k2, ONE);
    rhs(field, rep, t + 0.5 * h, &ws.stage, &mut ws.ham, &mut ws.k3);
    ws.stage.copy_from(psi);
    ws.stage.axpy(hc, &ws.k3, ONE);
    rhs(field, rep, t + h, &ws.stage, &mut ws.ham, &mut ws.k4);
    let h6 = Complex64::new(h / 6.0, 0.0);
    let h3 = Complex64::new(h / 3.0, 0.0);
    psi.axpy(h6, &ws.k1, ONE);
    psi.axpy(h3, &ws.k2, ONE);
    psi.axpy(h3, &ws.k3, ONE);
    psi.axpy(h6, &ws.k4, ONE);
}

fn expect_re(m: &DMatrix<Complex64>, psi: &DVector<Complex64>) -> f64 {
    let n = psi.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..n {
        for r in 0..n {
            acc += psi[r].conj() * m[(r, c)] * psi[c];
        }
    }
    acc.re
}

/// Propagate i dpsi/dt = H(t) psi with classical fourth-order Runge-Kutta at
/// a fixed internal step. Grid points are hit exactly (each grid interval is
/// subdivided uniformly so the internal step never exceeds `opts.step`), and
/// the state is never renormalized: norm drift is reported, and exceeding
/// `opts.norm_tolerance` is an error.
///
/// The local truncation error is estimated at the first step by a
/// step-halving comparison; an estimate above the limit is a warning, or an
/// error when `opts.strict_step_check` is set.
pub fn integrate(
    field: &EffectiveField,
    rep: &SpinRepresentation,
    psi0: &StateVector,
    t_grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<EvolutionResult> {
    assert_eq!(rep.j(), psi0.j(), "state and representation disagree on j");
    assert!(opts.step > 0.0 && opts.step.is_finite(), "step must be positive");
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTimes);
    }
    if let Some((start, end)) = field.domain() {
        let slack = 1e-9 * (end - start);
        let (t0, t1) = (t_grid[0], *t_grid.last().unwrap());
        if t0 < start - slack || t1 > end + slack {
            return Err(Error::DomainExceeded { t: t1, start, end });
        }
    }

    let dim = rep.dim();
    let mut ws = Rk4Workspace::new(dim);
    let mut psi = psi0.amplitudes().clone();

    // Step-halving estimate of the one-step truncation error at the start.
    let mut step_warning = None;
    if t_grid.len() > 1 {
        let h = substep(t_grid[0], t_grid[1], opts.step).1;
        let mut one = psi.clone();
        rk4_step(field, rep, &mut one, t_grid[0], h, &mut ws);
        let mut two = psi.clone();
        rk4_step(field, rep, &mut two, t_grid[0], 0.5 * h, &mut ws);
        rk4_step(field, rep, &mut two, t_grid[0] + 0.5 * h, 0.5 * h, &mut ws);
        let estimate = (one - two).norm() * 16.0 / 15.0;
        if estimate > tol::LOCAL_TRUNCATION_LIMIT {
            if opts.strict_step_check {
                return Err(Error::StepTooLarge {
                    estimate,
                    limit: tol::LOCAL_TRUNCATION_LIMIT,
                });
            }
            step_warning = Some(format!(
                "estimated local truncation {estimate:.3e} exceeds {:.1e}; reduce the step",
                tol::LOCAL_TRUNCATION_LIMIT
            ));
        }
    }

    let n = t_grid.len();
    let mut times = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    let mut helicity = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);

    let record = |t: f64,
                      psi: &DVector<Complex64>,
                      ws: &mut Rk4Workspace,
                      times: &mut Vec<f64>,
                      states: &mut Vec<DVector<Complex64>>,
                      helicity: &mut Vec<f64>,
                      energy: &mut Vec<f64>,
                      norms: &mut Vec<f64>| {
        direction_operator_into(&mut ws.ham, rep, field.direction(t));
        helicity.push(expect_re(&ws.ham, psi));
        direction_operator_into(&mut ws.ham, rep, field.value(t));
        energy.push(expect_re(&ws.ham, psi));
        norms.push(psi.norm());
        times.push(t);
        states.push(psi.clone());
    };

    record(
        t_grid[0], &psi, &mut ws, &mut times, &mut states, &mut helicity, &mut energy, &mut norms,
    );
    for w in t_grid.windows(2) {
        let (n_sub, h) = substep(w[0], w[1], opts.step);
        for k in 0..n_sub {
            let t = w[0] + k as f64 * h;
            rk4_step(field, rep, &mut psi, t, h, &mut ws);
        }
        record(
            w[1], &psi, &mut ws, &mut times, &mut states, &mut helicity, &mut energy, &mut norms,
        );
    }

    let norm_drift = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    if norm_drift > opts.norm_tolerance {
        return Err(Error::NormDrift {
            drift: norm_drift,
            tolerance: opts.norm_tolerance,
        });
    }

    Ok(EvolutionResult {
        times,
        states,
        helicity,
        energy,
        norms,
        norm_drift,
        j: rep.j(),
        step_warning,
    })
}

fn substep(ta: f64, tb: f64, step: f64) -> (usize, f64) {
    let delta = tb - ta;
    let n = ((delta / step) - 1e-9).ceil().max(1.0) as usize;
    (n, delta / n as f64)
}

/// Exact solution of the helix problem: the state
/// exp(-i phi(t)) V(t) |sigma> with V(t) = exp(beta S+ - beta* S-),
/// beta(t) = -(theta/2) exp(-i gamma t), and the attached phase
/// phi(t) = m gamma (1 - cos theta) t (all of it geometric; the dynamical
/// part vanishes).
///
/// Evaluation goes through the z-rotation factorization
/// V(t) = exp(-i gamma t Sz) exp(-i theta Sy) exp(+i gamma t Sz), which costs
/// a diagonal phase per component instead of a matrix exponential per time;
/// the equivalence with the ladder form is covered by tests.
#[derive(Clone, Debug)]
pub struct ClosedFormSolution {
    theta: f64,
    gamma: f64,
    m_sigma: f64,
    m_values: Vec<f64>,
    column: Vec<f64>,
    j: SpinJ,
}

/// A closed-form sample: the state and its phase.
#[derive(Clone, Debug)]
pub struct ClosedFormState {
    pub state: StateVector,
    pub phase: f64,
}

impl ClosedFormSolution {
    pub fn new(
        sigma: HelicitySign,
        theta: f64,
        gamma: f64,
        rep: &SpinRepresentation,
    ) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::PolarAngleOutOfRange { theta });
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidRotationRate);
        }
        let j = rep.j();
        let dim = rep.dim();
        let col_index = sigma.basis_index(j);
        let mut column = Vec::with_capacity(dim);
        let mut row = [0.0_f64; 3];
        for r in 0..dim {
            rotation_y_row(j, theta, r, &mut row);
            column.push(row[col_index]);
        }
        Ok(Self {
            theta,
            gamma,
            m_sigma: sigma.magnetic_number(j),
            m_values: rep.m_values().to_vec(),
            column,
            j,
        })
    }

    /// The geometric phase m gamma (1 - cos theta) t.
    pub fn phase(&self, t: f64) -> f64 {
        self.m_sigma * self.gamma * (1.0 - self.theta.cos()) * t
    }

    pub fn state_at(&self, t: f64) -> ClosedFormState {
        let w = self.gamma * t;
        let ct = self.theta.cos();
        let amps: Vec<Complex64> = self
            .m_values
            .iter()
            .zip(&self.column)
            .map(|(&m_r, &d)| {
                let arg = (self.m_sigma * ct - m_r) * w;
                Complex64::from_polar(1.0, arg) * d
            })
            .collect();
        let state = StateVector::new(DVector::from_vec(amps), self.j)
            .expect("rotation column is a unit vector");
        ClosedFormState {
            state,
            phase: self.phase(t),
        }
    }
}

/// One-shot evaluation of the closed-form solution.
pub fn closed_form_state(
    sigma: HelicitySign,
    theta: f64,
    gamma: f64,
    rep: &SpinRepresentation,
    t: f64,
) -> Result<ClosedFormState> {
    Ok(ClosedFormSolution::new(sigma, theta, gamma, rep)?.state_at(t))
}

/// The conditional initial state V(0)|sigma> = exp(-i theta Sy)|sigma>.
/// For j = 1/2 and sigma = +1 the amplitudes are (cos(theta/2), sin(theta/2)).
pub fn conditional_initial_state(
    sigma: HelicitySign,
    theta: f64,
    rep: &SpinRepresentation,
) -> Result<StateVector> {
    if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
        return Err(Error::PolarAngleOutOfRange { theta });
    }
    let j = rep.j();
    let col_index = sigma.basis_index(j);
    let mut row = [0.0_f64; 3];
    let amps: Vec<Complex64> = (0..rep.dim())
        .map(|r| {
            rotation_y_row(j, theta, r, &mut row);
            Complex64::new(row[col_index], 0.0)
        })
        .collect();
    Ok(StateVector::new(DVector::from_vec(amps), j).expect("rotation column is a unit vector"))
}

/// Eigenstate of khat(t) . S with eigenvalue m = sigma j: the moving-frame
/// ket V(t)|sigma> for the path's angles at time t.
pub fn frame_eigenstate(
    path: &PathSpec,
    sigma: HelicitySign,
    rep: &SpinRepresentation,
    t: f64,
) -> StateVector {
    let (theta, phi) = path.angles(t);
    let j = rep.j();
    let m_sigma = sigma.magnetic_number(j);
    let col_index = sigma.basis_index(j);
    let mut row = [0.0_f64; 3];
    let amps: Vec<Complex64> = rep
        .m_values()
        .iter()
        .enumerate()
        .map(|(r, &m_r)| {
            rotation_y_row(j, theta, r, &mut row);
            Complex64::from_polar(1.0, (m_sigma - m_r) * phi) * row[col_index]
        })
        .collect();
    StateVector::new(DVector::from_vec(amps), j).expect("frame ket is a unit vector")
}

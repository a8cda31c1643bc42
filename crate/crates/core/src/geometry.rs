//! Fiber paths as spherical angles of the wave vector, the effective
//! "magnetic field" b = k x kdot / k^2 they generate, and the perfect-guide
//! diagnostics.

use nalgebra::Vector3;
use rand::Rng;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::interp::{three_point_derivative, CubicSeries};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0; // m/s

/// Which printed form of the helix rotation rate to use.
///
/// `Paper` evaluates 2 pi c / (n sqrt(d^2 + (4 pi a)^2)) as printed in the
/// source literature; `Derived` uses the elementary arc-length form with
/// (2 pi a)^2. Neither is asserted correct; both are exposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaConvention {
    Paper,
    Derived,
}

impl GammaConvention {
    fn radius_factor(self) -> f64 {
        match self {
            GammaConvention::Paper => 4.0 * PI,
            GammaConvention::Derived => 2.0 * PI,
        }
    }
}

impl FromStr for GammaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "paper" => Ok(GammaConvention::Paper),
            "derived" => Ok(GammaConvention::Derived),
            _ => Err(Error::InvalidHelix {
                reason: format!("unknown gamma convention '{s}' (expected 'paper' or 'derived')"),
            }),
        }
    }
}

impl fmt::Display for GammaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaConvention::Paper => write!(f, "paper"),
            GammaConvention::Derived => write!(f, "derived"),
        }
    }
}

/// Winding sense of the helix; flips the sign of the rotation rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn sign(self) -> f64 {
        match self {
            Handedness::Right => 1.0,
            Handedness::Left => -1.0,
        }
    }

    pub fn try_from_int(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Handedness::Right),
            -1 => Ok(Handedness::Left),
            _ => Err(Error::InvalidHelix {
                reason: format!("handedness must be +1 or -1, got {v}"),
            }),
        }
    }
}

/// Physical helix geometry.
#[derive(Clone, Copy, Debug)]
pub struct HelixSpec {
    pub pitch: f64,
    pub radius: f64,
    pub index: f64,
    pub handedness: Handedness,
    pub k_mag: f64,
}

impl HelixSpec {
    pub fn new(
        pitch: f64,
        radius: f64,
        index: f64,
        handedness: Handedness,
        k_mag: f64,
    ) -> Result<Self> {
        if !(pitch.is_finite() && radius.is_finite() && index.is_finite() && k_mag.is_finite()) {
            return Err(Error::NonFinite { what: "helix spec" });
        }
        if pitch == 0.0 && radius == 0.0 {
            return Err(Error::InvalidHelix {
                reason: "pitch and radius are both zero (degenerate path)".into(),
            });
        }
        if pitch <= 0.0 {
            return Err(Error::InvalidHelix {
                reason: format!("pitch must be positive, got {pitch}"),
            });
        }
        if radius < 0.0 {
            return Err(Error::InvalidHelix {
                reason: format!("radius must be non-negative, got {radius}"),
            });
        }
        if index < 1.0 {
            return Err(Error::InvalidHelix {
                reason: format!("refractive index must be >= 1, got {index}"),
            });
        }
        if k_mag <= 0.0 {
            return Err(Error::InvalidHelix {
                reason: format!("wave-vector magnitude must be positive, got {k_mag}"),
            });
        }
        Ok(Self {
            pitch,
            radius,
            index,
            handedness,
            k_mag,
        })
    }

    /// Polar angle of the tangent under the elementary helix geometry,
    /// atan2(2 pi a, d). Under the `Paper` convention theta stays a free
    /// input and this value is advisory.
    pub fn theta_derived(&self) -> f64 {
        (2.0 * PI * self.radius).atan2(self.pitch)
    }
}

/// Rotation rate of the wave vector for a helical guide:
/// handedness * 2 pi c / (n sqrt(d^2 + (q pi a)^2)) with q per convention.
pub fn helix_gamma(spec: &HelixSpec, c: f64, convention: GammaConvention) -> f64 {
    let q = convention.radius_factor();
    let arc = (spec.pitch * spec.pitch + (q * spec.radius) * (q * spec.radius)).sqrt();
    spec.handedness.sign() * 2.0 * PI * c / (spec.index * arc)
}

/// Wave vector of constant-polar-angle rotation:
/// k_mag (sin theta cos(gamma t), sin theta sin(gamma t), cos theta).
pub fn helix_wavevector(theta: f64, gamma: f64, k_mag: f64, t: f64) -> Vector3<f64> {
    debug_assert!((0.0..=PI).contains(&theta));
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = (gamma * t).sin_cos();
    Vector3::new(k_mag * st * cp, k_mag * st * sp, k_mag * ct)
}

fn unit_from_angles(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Analytic path with sinusoidally modulated angles; exact angle rates make
/// it the reference for arbitrary smooth time-dependent theta(t), phi(t).
#[derive(Clone, Copy, Debug)]
pub struct TrigPath {
    pub theta0: f64,
    pub theta_amp: f64,
    pub theta_freq: f64,
    pub theta_phase: f64,
    /// Mean azimuthal rate; phi(t) = rate * t + phi_amp sin(phi_freq t + phi_phase).
    pub rate: f64,
    pub phi_amp: f64,
    pub phi_freq: f64,
    pub phi_phase: f64,
    pub k_mag: f64,
}

impl TrigPath {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        theta0: f64,
        theta_amp: f64,
        theta_freq: f64,
        theta_phase: f64,
        rate: f64,
        phi_amp: f64,
        phi_freq: f64,
        phi_phase: f64,
        k_mag: f64,
    ) -> Result<Self> {
        let params = [
            theta0,
            theta_amp,
            theta_freq,
            theta_phase,
            rate,
            phi_amp,
            phi_freq,
            phi_phase,
            k_mag,
        ];
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite { what: "trig path" });
        }
        if theta0 - theta_amp.abs() < 0.0 || theta0 + theta_amp.abs() > PI {
            return Err(Error::PolarAngleOutOfRange {
                theta: theta0 + theta_amp.abs(),
            });
        }
        if k_mag <= 0.0 {
            return Err(Error::ZeroWaveVector);
        }
        Ok(Self {
            theta0,
            theta_amp,
            theta_freq,
            theta_phase,
            rate,
            phi_amp,
            phi_freq,
            phi_phase,
            k_mag,
        })
    }

    fn theta(&self, t: f64) -> f64 {
        self.theta0 + self.theta_amp * (self.theta_freq * t + self.theta_phase).sin()
    }

    fn phi(&self, t: f64) -> f64 {
        self.rate * t + self.phi_amp * (self.phi_freq * t + self.phi_phase).sin()
    }

    fn theta_dot(&self, t: f64) -> f64 {
        self.theta_amp * self.theta_freq * (self.theta_freq * t + self.theta_phase).cos()
    }

    fn phi_dot(&self, t: f64) -> f64 {
        self.rate + self.phi_amp * self.phi_freq * (self.phi_freq * t + self.phi_phase).cos()
    }
}

/// Draw a generic smooth wobbling path with mean azimuthal rate `rate`.
/// The polar angle stays inside [0.15, pi - 0.15] and the field magnitude
/// stays within a few multiples of `rate`.
pub fn random_smooth_path<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> TrigPath {
    let theta0 = rng.random_range(0.6..PI - 0.9);
    let theta_amp = rng.random_range(0.05..0.35);
    let theta_freq = rate * rng.random_range(0.3..1.7);
    let theta_phase = rng.random_range(0.0..2.0 * PI);
    let phi_amp = rng.random_range(0.05..0.5);
    let phi_freq = rate * rng.random_range(0.3..1.7);
    let phi_phase = rng.random_range(0.0..2.0 * PI);
    TrigPath::new(
        theta0,
        theta_amp,
        theta_freq,
        theta_phase,
        rate,
        phi_amp,
        phi_freq,
        phi_phase,
        1.0,
    )
    .expect("generated parameters are in range")
}

/// Tabulated path: strictly increasing times and angle series, phi stored
/// continuously unwrapped. Evaluation between samples is cubic Hermite.
#[derive(Clone, Debug)]
pub struct SampledPath {
    times: Vec<f64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    k_mag: f64,
    theta_interp: CubicSeries,
    phi_interp: CubicSeries,
}

impl SampledPath {
    /// `phi` may arrive wrapped; it is unwrapped by continuity. Consecutive
    /// steps of pi or more are rejected as ambiguous.
    pub fn new(times: Vec<f64>, theta: Vec<f64>, phi: Vec<f64>, k_mag: f64) -> Result<Self> {
        if times.len() < 3 {
            return Err(Error::Ingest(format!(
                "need at least 3 samples, got {}",
                times.len()
            )));
        }
        if times.len() != theta.len() || times.len() != phi.len() {
            return Err(Error::Ingest("length mismatch between columns".into()));
        }
        if times
            .iter()
            .chain(theta.iter())
            .chain(phi.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite { what: "path sample" });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NonMonotoneTimes);
        }
        if k_mag <= 0.0 || !k_mag.is_finite() {
            return Err(Error::ZeroWaveVector);
        }
        // Steps are reconstructed mod 2 pi assuming the true |dphi| between
        // samples stays below pi; a wrapped step indistinguishable from a
        // half turn is ambiguous and rejected.
        let mut unwrapped = Vec::with_capacity(phi.len());
        unwrapped.push(phi[0]);
        for i in 1..phi.len() {
            let delta = wrap_to_pm_pi(phi[i] - phi[i - 1]);
            if delta.abs() >= PI - 1e-9 {
                return Err(Error::PhiJump { index: i, delta });
            }
            unwrapped.push(unwrapped[i - 1] + delta);
        }
        let theta_interp = CubicSeries::new(&times, &theta);
        let phi_interp = CubicSeries::new(&times, &unwrapped);
        Ok(Self {
            times,
            theta,
            phi: unwrapped,
            k_mag,
            theta_interp,
            phi_interp,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn theta_series(&self) -> &[f64] {
        &self.theta
    }

    /// Unwrapped azimuth series.
    pub fn phi_series(&self) -> &[f64] {
        &self.phi
    }

    pub fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    /// Keep every `stride`-th sample (plus the last); used by convergence
    /// diagnostics.
    pub(crate) fn decimate(&self, stride: usize) -> Result<Self> {
        let mut times = Vec::new();
        let mut theta = Vec::new();
        let mut phi = Vec::new();
        for i in (0..self.times.len()).step_by(stride) {
            times.push(self.times[i]);
            theta.push(self.theta[i]);
            phi.push(self.phi[i]);
        }
        let last = self.times.len() - 1;
        if *times.last().unwrap() < self.times[last] {
            times.push(self.times[last]);
            theta.push(self.theta[last]);
            phi.push(self.phi[last]);
        }
        Self::new(times, theta, phi, self.k_mag)
    }
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_to_pm_pi(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// A fiber path given as spherical angles of the wave vector.
#[derive(Clone, Debug)]
pub enum PathSpec {
    /// Constant polar angle, azimuth = rate * t.
    Helix { theta: f64, rate: f64, k_mag: f64 },
    /// Analytic angles with sinusoidal modulation.
    Trig(TrigPath),
    /// Tabulated angles.
    Sampled(SampledPath),
}

impl PathSpec {
    pub fn helix(theta: f64, rate: f64, k_mag: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::PolarAngleOutOfRange { theta });
        }
        if !rate.is_finite() {
            return Err(Error::InvalidRotationRate);
        }
        if k_mag <= 0.0 || !k_mag.is_finite() {
            return Err(Error::ZeroWaveVector);
        }
        Ok(PathSpec::Helix { theta, rate, k_mag })
    }

    pub fn k_mag(&self) -> f64 {
        match self {
            PathSpec::Helix { k_mag, .. } => *k_mag,
            PathSpec::Trig(p) => p.k_mag,
            PathSpec::Sampled(p) => p.k_mag,
        }
    }

    /// (theta, unwrapped phi) at time t.
    pub fn angles(&self, t: f64) -> (f64, f64) {
        match self {
            PathSpec::Helix { theta, rate, .. } => (*theta, rate * t),
            PathSpec::Trig(p) => (p.theta(t), p.phi(t)),
            PathSpec::Sampled(p) => (p.theta_interp.value(t), p.phi_interp.value(t)),
        }
    }

    /// (dtheta/dt, dphi/dt) at time t.
    pub fn angle_rates(&self, t: f64) -> (f64, f64) {
        match self {
            PathSpec::Helix { rate, .. } => (0.0, *rate),
            PathSpec::Trig(p) => (p.theta_dot(t), p.phi_dot(t)),
            PathSpec::Sampled(p) => (p.theta_interp.derivative(t), p.phi_interp.derivative(t)),
        }
    }

    /// Unit propagation direction at time t.
    pub fn direction(&self, t: f64) -> Vector3<f64> {
        let (theta, phi) = self.angles(t);
        unit_from_angles(theta, phi)
    }

    /// Wave vector k(t); |k| = k_mag by construction.
    pub fn wavevector(&self, t: f64) -> Vector3<f64> {
        self.direction(t) * self.k_mag()
    }

    /// Time span for sampled paths; analytic paths are unbounded.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            PathSpec::Sampled(p) => Some(p.span()),
            _ => None,
        }
    }

    /// Build the effective field b(t) = k x kdot / k^2 for this path.
    pub fn effective_field(&self) -> EffectiveField {
        EffectiveField::new(self)
    }
}

/// The phenomenological "magnetic field" of the wave-propagation equation,
/// evaluable at any time inside the path domain.
///
/// Analytic paths use closed forms; sampled paths tabulate
/// b_i = k_i x kdot_i / k^2 with three-point finite differences for kdot
/// (one-sided at the endpoints) and interpolate between nodes.
#[derive(Clone, Debug)]
pub struct EffectiveField {
    path: PathSpec,
    table: Option<FieldTable>,
    /// Fault-injection offset for verification; zero in normal use.
    bias: Vector3<f64>,
}

#[derive(Clone, Debug)]
struct FieldTable {
    bx: CubicSeries,
    by: CubicSeries,
    bz: CubicSeries,
}

impl EffectiveField {
    pub fn new(path: &PathSpec) -> Self {
        let table = match path {
            PathSpec::Sampled(p) => Some(Self::tabulate(p)),
            _ => None,
        };
        Self {
            path: path.clone(),
            table,
            bias: Vector3::zeros(),
        }
    }

    fn tabulate(p: &SampledPath) -> FieldTable {
        let n = p.times.len();
        // b = khat x d khat/dt: the magnitude k_mag cancels in k x kdot / k^2.
        let (mut kx, mut ky, mut kz) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let u = unit_from_angles(p.theta[i], p.phi[i]);
            kx.push(u.x);
            ky.push(u.y);
            kz.push(u.z);
        }
        let dx = three_point_derivative(&p.times, &kx);
        let dy = three_point_derivative(&p.times, &ky);
        let dz = three_point_derivative(&p.times, &kz);
        let (mut bx, mut by, mut bz) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let k = Vector3::new(kx[i], ky[i], kz[i]);
            let kd = Vector3::new(dx[i], dy[i], dz[i]);
            let b = k.cross(&kd);
            bx.push(b.x);
            by.push(b.y);
            bz.push(b.z);
        }
        FieldTable {
            bx: CubicSeries::new(&p.times, &bx),
            by: CubicSeries::new(&p.times, &by),
            bz: CubicSeries::new(&p.times, &bz),
        }
    }

    /// Add a constant offset to the field (deliberate corruption for
    /// negative-control checks).
    pub fn with_bias(mut self, bias: Vector3<f64>) -> Self {
        self.bias = bias;
        self
    }

    /// b(t) in rad/s.
    pub fn value(&self, t: f64) -> Vector3<f64> {
        let b = match (&self.path, &self.table) {
            (PathSpec::Helix { theta, rate, .. }, _) => {
                // gamma sin(theta) (-cos(theta) cos(gamma t), -cos(theta) sin(gamma t), sin(theta))
                let (st, ct) = theta.sin_cos();
                let (sp, cp) = (rate * t).sin_cos();
                Vector3::new(-rate * st * ct * cp, -rate * st * ct * sp, rate * st * st)
            }
            (PathSpec::Trig(_), _) => self.analytic_from_rates(t),
            (PathSpec::Sampled(_), Some(tab)) => {
                Vector3::new(tab.bx.value(t), tab.by.value(t), tab.bz.value(t))
            }
            (PathSpec::Sampled(_), None) => unreachable!("sampled field always tabulated"),
        };
        b + self.bias
    }

    /// b from exact angle rates: b = thetadot phihat - phidot sin(theta) thetahat.
    fn analytic_from_rates(&self, t: f64) -> Vector3<f64> {
        let (theta, phi) = self.path.angles(t);
        let (td, pd) = self.path.angle_rates(t);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Vector3::new(
            -td * sp - pd * st * ct * cp,
            td * cp - pd * st * ct * sp,
            pd * st * st,
        )
    }

    pub fn direction(&self, t: f64) -> Vector3<f64> {
        self.path.direction(t)
    }

    pub fn angles(&self, t: f64) -> (f64, f64) {
        self.path.angles(t)
    }

    pub fn path(&self) -> &PathSpec {
        &self.path
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.path.domain()
    }

    /// |b . khat| / |b|, the orthogonality defect (0 for an honest field).
    pub fn orthogonality_residual(&self, t: f64) -> f64 {
        let b = self.value(t);
        let norm = b.norm();
        if norm == 0.0 {
            0.0
        } else {
            b.dot(&self.direction(t)).abs() / norm
        }
    }
}

/// Raw rows accepted by the ingestion entry points.
pub enum IngestRows {
    /// (t, x, y, z) positions of the guide in meters.
    Cartesian(Vec<[f64; 4]>),
    /// (t, theta, phi) tangent angles in radians.
    Angles(Vec<[f64; 3]>),
}

/// Build a sampled path from raw rows. Cartesian rows are differentiated
/// (three-point stencils) to get the tangent, which is normalized onto the
/// sphere; angle rows are taken as-is. Azimuths are unwrapped continuously.
pub fn ingest_path(rows: &IngestRows, k_mag: f64) -> Result<PathSpec> {
    match rows {
        IngestRows::Angles(rows) => {
            let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let theta: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            let phi: Vec<f64> = rows.iter().map(|r| r[2]).collect();
            check_times(&times)?;
            Ok(PathSpec::Sampled(SampledPath::new(times, theta, phi, k_mag)?))
        }
        IngestRows::Cartesian(rows) => {
            if rows.len() < 3 {
                return Err(Error::Ingest(format!(
                    "need at least 3 samples, got {}",
                    rows.len()
                )));
            }
            let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            check_times(&times)?;
            let xs: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r[2]).collect();
            let zs: Vec<f64> = rows.iter().map(|r| r[3]).collect();
            let vx = three_point_derivative(&times, &xs);
            let vy = three_point_derivative(&times, &ys);
            let vz = three_point_derivative(&times, &zs);

            let mut theta = Vec::with_capacity(rows.len());
            let mut phi = Vec::with_capacity(rows.len());
            let mut prev_phi = 0.0;
            for i in 0..rows.len() {
                let v = Vector3::new(vx[i], vy[i], vz[i]);
                let speed = v.norm();
                if speed == 0.0 || !speed.is_finite() {
                    return Err(Error::Ingest(format!(
                        "zero-length tangent at sample {i} (t = {})",
                        times[i]
                    )));
                }
                let u = v / speed;
                theta.push(u.z.clamp(-1.0, 1.0).acos());
                // Azimuth is meaningless on the poles; carry the previous one.
                let transverse = u.x.hypot(u.y);
                let p = if transverse < 1e-12 {
                    prev_phi
                } else {
                    u.y.atan2(u.x)
                };
                prev_phi = p;
                phi.push(p);
            }
            Ok(PathSpec::Sampled(SampledPath::new(times, theta, phi, k_mag)?))
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    for w in times.windows(2) {
        if w[1] == w[0] {
            return Err(Error::Ingest(format!("duplicate timestamp {}", w[0])));
        }
        if w[1] < w[0] {
            return Err(Error::NonMonotoneTimes);
        }
    }
    Ok(())
}

/// Read a sampled path from a comma-separated text file with a header of
/// either `t,x,y,z` or `t,theta,phi`. Lines starting with `#` are ignored.
pub fn read_path_file(path: &Path, k_mag: f64) -> Result<PathSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Ingest(format!("cannot read {}: {e}", path.display())))?;
    parse_path_text(&text, k_mag)
}

pub fn parse_path_text(text: &str, k_mag: f64) -> Result<PathSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Ingest("empty path file".into()))?;
    let header_fields: Vec<String> = header
        .split(',')
        .map(|f| f.trim().to_ascii_lowercase())
        .collect();
    let cartesian = match header_fields
        .iter()
        .map(String::as_str)
        .collect::<Vec<_>>()
        .as_slice()
    {
        ["t", "x", "y", "z"] => true,
        ["t", "theta", "phi"] => false,
        _ => {
            return Err(Error::Ingest(format!(
                "unrecognized header '{header}' (expected 't,x,y,z' or 't,theta,phi')"
            )))
        }
    };

    let ncols = if cartesian { 4 } else { 3 };
    let mut cart = Vec::new();
    let mut ang = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Ingest(format!("line {lineno}: {e}")))?;
        if fields.len() != ncols {
            return Err(Error::Ingest(format!(
                "line {lineno}: expected {ncols} fields, got {}",
                fields.len()
            )));
        }
        if cartesian {
            cart.push([fields[0], fields[1], fields[2], fields[3]]);
        } else {
            ang.push([fields[0], fields[1], fields[2]]);
        }
    }
    let rows = if cartesian {
        IngestRows::Cartesian(cart)
    } else {
        IngestRows::Angles(ang)
    };
    ingest_path(&rows, k_mag)
}

/// Result of the wave-vector motion identity check
/// kdot + k x (k x kdot / k^2) = 0.
#[derive(Clone, Copy, Debug)]
pub struct MotionIdentityReport {
    /// max over the grid of ||kdot + k x (k x kdot)/k^2|| / ||kdot||.
    pub max_residual: f64,
    /// Richardson-style estimate of the finite-difference error for sampled
    /// paths; `None` for analytic paths (the identity is exact there).
    pub fd_error_estimate: Option<f64>,
}

/// Evaluate the motion identity residual. Analytic paths are checked on
/// `t_grid` with exact derivatives; sampled paths are checked on their own
/// sample times with finite-difference derivatives and report an error
/// estimate alongside. Samples with kdot = 0 contribute zero residual.
pub fn check_motion_identity(path: &PathSpec, t_grid: &[f64]) -> MotionIdentityReport {
    match path {
        PathSpec::Sampled(p) => {
            let r = sampled_motion_residual(p);
            let estimate = p.decimate(2).ok().map(|coarse| {
                let r2 = sampled_motion_residual(&coarse);
                (2.0 / 3.0) * (r2 - r).abs() + 1e-14
            });
            MotionIdentityReport {
                max_residual: r,
                fd_error_estimate: estimate,
            }
        }
        _ => {
            let mut max_residual = 0.0_f64;
            for &t in t_grid {
                let k = path.wavevector(t);
                let (theta, phi) = path.angles(t);
                let (td, pd) = path.angle_rates(t);
                let kdot = tangent_rate(theta, phi, td, pd) * path.k_mag();
                max_residual = max_residual.max(motion_residual(k, kdot));
            }
            MotionIdentityReport {
                max_residual,
                fd_error_estimate: None,
            }
        }
    }
}

/// d khat / dt from the angle rates.
fn tangent_rate(theta: f64, phi: f64, theta_dot: f64, phi_dot: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    // thetahat * theta_dot + phihat * sin(theta) * phi_dot
    Vector3::new(
        theta_dot * ct * cp - phi_dot * st * sp,
        theta_dot * ct * sp + phi_dot * st * cp,
        -theta_dot * st,
    )
}

fn motion_residual(k: Vector3<f64>, kdot: Vector3<f64>) -> f64 {
    let kn = kdot.norm();
    if kn == 0.0 {
        return 0.0;
    }
    let k2 = k.norm_squared();
    let lorentz = k.cross(&(k.cross(&kdot) / k2));
    (kdot + lorentz).norm() / kn
}

fn sampled_motion_residual(p: &SampledPath) -> f64 {
    let n = p.times.len();
    let (mut kx, mut ky, mut kz) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let u = unit_from_angles(p.theta[i], p.phi[i]) * p.k_mag;
        kx.push(u.x);
        ky.push(u.y);
        kz.push(u.z);
    }
    let dx = three_point_derivative(&p.times, &kx);
    let dy = three_point_derivative(&p.times, &ky);
    let dz = three_point_derivative(&p.times, &kz);
    let mut max_residual = 0.0_f64;
    for i in 0..n {
        let k = Vector3::new(kx[i], ky[i], kz[i]);
        let kdot = Vector3::new(dx[i], dy[i], dz[i]);
        max_residual = max_residual.max(motion_residual(k, kdot));
    }
    max_residual
}

/// True iff k0 lies in the x-z plane with k0x/k0z = tan(theta):
/// |k0y| <= 1e-12 |k0| and |k0x cos(theta) - k0z sin(theta)| <= 1e-12 |k0|.
pub fn initial_wavevector_check(k0: Vector3<f64>, theta: f64) -> Result<bool> {
    let norm = k0.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroWaveVector);
    }
    let planar = k0.y.abs() <= 1e-12 * norm;
    let aligned = (k0.x * theta.cos() - k0.z * theta.sin()).abs() <= 1e-12 * norm;
    Ok(planar && aligned)
}

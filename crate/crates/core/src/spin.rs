//! Spin operator matrices for j = 1/2 and j = 1 (hbar = 1), basis states and
//! the small unitary exponentials everything else is built from.
//!
//! Basis order is m = +j, ..., -j; the up/down kets are the extremal
//! components m = +j and m = -j.

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tol;

/// Supported spin quantum numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinJ {
    Half,
    One,
}

impl SpinJ {
    pub fn value(self) -> f64 {
        match self {
            SpinJ::Half => 0.5,
            SpinJ::One => 1.0,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            SpinJ::Half => 2,
            SpinJ::One => 3,
        }
    }

    /// Numeric constructor; anything but 1/2 or 1 is rejected.
    pub fn try_from_value(j: f64) -> Result<Self> {
        if (j - 0.5).abs() < 1e-12 {
            Ok(SpinJ::Half)
        } else if (j - 1.0).abs() < 1e-12 {
            Ok(SpinJ::One)
        } else {
            Err(Error::UnsupportedSpin(j))
        }
    }
}

impl FromStr for SpinJ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1/2" | "0.5" | ".5" => Ok(SpinJ::Half),
            "1" | "1.0" => Ok(SpinJ::One),
            other => Err(Error::UnsupportedSpin(other.parse().unwrap_or(f64::NAN))),
        }
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpinJ::Half => write!(f, "1/2"),
            SpinJ::One => write!(f, "1"),
        }
    }
}

/// Sign label of an extremal S_z eigenstate: `Plus` is m = +j (the up ket),
/// `Minus` is m = -j. The longitudinal m = 0 component of j = 1 is kept in
/// the linear algebra but is not a valid label for an initial state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HelicitySign {
    Plus,
    Minus,
}

impl HelicitySign {
    pub fn sign(self) -> f64 {
        match self {
            HelicitySign::Plus => 1.0,
            HelicitySign::Minus => -1.0,
        }
    }

    /// Magnetic quantum number of the labelled state: +j or -j.
    pub fn magnetic_number(self, j: SpinJ) -> f64 {
        self.sign() * j.value()
    }

    pub fn basis_index(self, j: SpinJ) -> usize {
        match self {
            HelicitySign::Plus => 0,
            HelicitySign::Minus => j.dim() - 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            HelicitySign::Plus => HelicitySign::Minus,
            HelicitySign::Minus => HelicitySign::Plus,
        }
    }

    pub fn try_from_int(v: i32) -> Result<Self> {
        match v {
            1 => Ok(HelicitySign::Plus),
            -1 => Ok(HelicitySign::Minus),
            0 => Err(Error::LongitudinalState),
            _ => Err(Error::NonFinite { what: "sigma" }),
        }
    }
}

impl fmt::Display for HelicitySign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HelicitySign::Plus => write!(f, "+1"),
            HelicitySign::Minus => write!(f, "-1"),
        }
    }
}

/// Spin operator matrices for one representation.
///
/// `splus`/`sminus` are built first from the ladder coefficients, and
/// `sx = (S+ + S-)/2`, `sy = (S+ - S-)/(2i)`, so `S+- = Sx +- i Sy` holds
/// exactly in floating point.
#[derive(Clone, Debug)]
pub struct SpinRepresentation {
    j: SpinJ,
    sx: DMatrix<Complex64>,
    sy: DMatrix<Complex64>,
    sz: DMatrix<Complex64>,
    splus: DMatrix<Complex64>,
    sminus: DMatrix<Complex64>,
    m_values: Vec<f64>,
}

impl SpinRepresentation {
    pub fn new(j: SpinJ) -> Self {
        let dim = j.dim();
        let jv = j.value();
        let m_values: Vec<f64> = (0..dim).map(|i| jv - i as f64).collect();

        let mut splus = DMatrix::<Complex64>::zeros(dim, dim);
        for (col, &m) in m_values.iter().enumerate().skip(1) {
            // S+ |j m> = sqrt(j(j+1) - m(m+1)) |j m+1>
            let c = (jv * (jv + 1.0) - m * (m + 1.0)).sqrt();
            splus[(col - 1, col)] = Complex64::new(c, 0.0);
        }
        let sminus = splus.adjoint();
        let sx = (&splus + &sminus).map(|z| z * 0.5);
        let sy = (&splus - &sminus).map(|z| z * Complex64::new(0.0, -0.5));
        let sz = DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            m_values.iter().map(|&m| Complex64::new(m, 0.0)),
        ));

        Self {
            j,
            sx,
            sy,
            sz,
            splus,
            sminus,
            m_values,
        }
    }

    /// Numeric-facing constructor mirroring the representation preconditions.
    pub fn from_quantum_number(j: f64) -> Result<Self> {
        Ok(Self::new(SpinJ::try_from_value(j)?))
    }

    pub fn j(&self) -> SpinJ {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn sx(&self) -> &DMatrix<Complex64> {
        &self.sx
    }

    pub fn sy(&self) -> &DMatrix<Complex64> {
        &self.sy
    }

    pub fn sz(&self) -> &DMatrix<Complex64> {
        &self.sz
    }

    pub fn splus(&self) -> &DMatrix<Complex64> {
        &self.splus
    }

    pub fn sminus(&self) -> &DMatrix<Complex64> {
        &self.sminus
    }

    /// S_z eigenvalues in basis order (+j down to -j).
    pub fn m_values(&self) -> &[f64] {
        &self.m_values
    }

    /// Projection of the spin vector onto a direction: `n . S`.
    pub fn direction_operator(&self, n: Vector3<f64>) -> DMatrix<Complex64> {
        let mut out = DMatrix::<Complex64>::zeros(self.dim(), self.dim());
        direction_operator_into(&mut out, self, n);
        out
    }
}

pub(crate) fn direction_operator_into(
    out: &mut DMatrix<Complex64>,
    rep: &SpinRepresentation,
    n: Vector3<f64>,
) {
    for (o, (x, (y, z))) in out
        .iter_mut()
        .zip(rep.sx.iter().zip(rep.sy.iter().zip(rep.sz.iter())))
    {
        *o = x * n.x + y * n.y + z * n.z;
    }
}

/// Normalized amplitude vector in the S_z eigenbasis of one representation.
#[derive(Clone, Debug)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
    j: SpinJ,
}

impl StateVector {
    /// Rejects vectors whose norm deviates from 1 beyond the construction
    /// tolerance, and dimension mismatches.
    pub fn new(amplitudes: DVector<Complex64>, j: SpinJ) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::NonFinite {
                what: "state dimension",
            });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, j })
    }

    /// The extremal basis ket |m = +j> or |m = -j>.
    pub fn basis(j: SpinJ, sign: HelicitySign) -> Self {
        let mut amplitudes = DVector::<Complex64>::zeros(j.dim());
        amplitudes[sign.basis_index(j)] = Complex64::new(1.0, 0.0);
        Self { amplitudes, j }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn j(&self) -> SpinJ {
        self.j
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Expectation vector (<Sx>, <Sy>, <Sz>) of a state.
pub fn spin_expectation(state: &StateVector, rep: &SpinRepresentation) -> Vector3<f64> {
    let psi = state.amplitudes();
    let ex = psi.dotc(&(rep.sx() * psi)).re;
    let ey = psi.dotc(&(rep.sy() * psi)).re;
    let ez = psi.dotc(&(rep.sz() * psi)).re;
    Vector3::new(ex, ey, ez)
}

/// Unitary exponential `exp(A)` of an anti-Hermitian matrix, computed through
/// the Hermitian eigendecomposition of `iA`. Exact to rounding at these sizes.
pub fn expm_antihermitian(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let residual = (a + a.adjoint()).norm();
    if !residual.is_finite() || residual > tol::ANTI_HERMITIAN {
        return Err(Error::NotAntiHermitian { residual });
    }
    // h = i * (A - A')/2 is Hermitian to rounding even if A was only
    // anti-Hermitian to tolerance.
    let h = (a - a.adjoint()).map(|z| Complex64::new(0.0, 0.5) * z);
    let eig = h.symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (-Complex64::i() * l).exp()));
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}

/// The frame rotation `exp(beta S+ - beta* S-)`.
pub fn ladder_rotation(beta: Complex64, rep: &SpinRepresentation) -> Result<DMatrix<Complex64>> {
    if !beta.re.is_finite() || !beta.im.is_finite() {
        return Err(Error::NonFinite { what: "beta" });
    }
    let gen = rep.splus().map(|z| beta * z) - rep.sminus().map(|z| beta.conj() * z);
    expm_antihermitian(&gen)
}

/// Closed-form `exp(-i angle Sy)`: the real rotation matrix of the
/// representation (reduced Wigner d for dims 2 and 3).
pub fn rotation_y(rep: &SpinRepresentation, angle: f64) -> DMatrix<Complex64> {
    let dim = rep.dim();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    let mut row = [0.0_f64; 3];
    for r in 0..dim {
        rotation_y_row(rep.j(), angle, r, &mut row);
        for c in 0..dim {
            out[(r, c)] = Complex64::new(row[c], 0.0);
        }
    }
    out
}

/// One row of `exp(-i angle Sy)` written into `out[..dim]`.
pub(crate) fn rotation_y_row(j: SpinJ, angle: f64, row: usize, out: &mut [f64; 3]) {
    match j {
        SpinJ::Half => {
            let (s, c) = (0.5 * angle).sin_cos();
            match row {
                0 => {
                    out[0] = c;
                    out[1] = -s;
                }
                1 => {
                    out[0] = s;
                    out[1] = c;
                }
                _ => unreachable!(),
            }
        }
        SpinJ::One => {
            let (s, c) = angle.sin_cos();
            let sq = s / std::f64::consts::SQRT_2;
            match row {
                0 => {
                    out[0] = 0.5 * (1.0 + c);
                    out[1] = -sq;
                    out[2] = 0.5 * (1.0 - c);
                }
                1 => {
                    out[0] = sq;
                    out[1] = c;
                    out[2] = -sq;
                }
                2 => {
                    out[0] = 0.5 * (1.0 - c);
                    out[1] = sq;
                    out[2] = 0.5 * (1.0 + c);
                }
                _ => unreachable!(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn commutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        a * b - b * a
    }

    fn max_abs(m: &DMatrix<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn sz_diagonals() {
        let half = SpinRepresentation::new(SpinJ::Half);
        assert_eq!(half.sz()[(0, 0)], Complex64::new(0.5, 0.0));
        assert_eq!(half.sz()[(1, 1)], Complex64::new(-0.5, 0.0));
        let one = SpinRepresentation::new(SpinJ::One);
        assert_eq!(one.sz()[(0, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(one.sz()[(1, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(one.sz()[(2, 2)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn unsupported_spin_rejected() {
        assert!(matches!(
            SpinRepresentation::from_quantum_number(1.5),
            Err(Error::UnsupportedSpin(_))
        ));
        assert!(SpinJ::try_from_value(0.7).is_err());
        assert!("3/2".parse::<SpinJ>().is_err());
    }

    #[test]
    fn commutation_relations() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            let i = Complex64::i();
            let c1 = commutator(r.sx(), r.sy()) - r.sz().map(|z| i * z);
            let c2 = commutator(r.sy(), r.sz()) - r.sx().map(|z| i * z);
            let c3 = commutator(r.sz(), r.sx()) - r.sy().map(|z| i * z);
            for c in [c1, c2, c3] {
                assert!(max_abs(&c) <= tol::COMMUTATOR);
            }
        }
    }

    #[test]
    fn casimir_identity() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            let jv = j.value();
            let total = r.sx() * r.sx() + r.sy() * r.sy() + r.sz() * r.sz();
            let expect = DMatrix::<Complex64>::identity(j.dim(), j.dim())
                .map(|z| z * (jv * (jv + 1.0)));
            assert!(max_abs(&(total - expect)) <= tol::COMMUTATOR);
        }
    }

    #[test]
    fn ladder_operators_exact() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            let i = Complex64::i();
            let plus = r.sx() + r.sy().map(|z| i * z);
            let minus = r.sx() - r.sy().map(|z| i * z);
            assert_eq!(max_abs(&(plus - r.splus())), 0.0);
            assert_eq!(max_abs(&(minus - r.sminus())), 0.0);
        }
    }

    #[test]
    fn hermiticity() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            for m in [r.sx(), r.sy(), r.sz()] {
                assert!(max_abs(&(m - m.adjoint())) == 0.0);
            }
        }
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let dim = 3;
        let u = expm_antihermitian(&DMatrix::zeros(dim, dim)).unwrap();
        assert!(max_abs(&(u - DMatrix::identity(dim, dim))) <= 1e-15);
    }

    #[test]
    fn expm_minus_i_pi_sz_half() {
        // exp(-i pi Sz) = diag(e^{-i pi/2}, e^{+i pi/2}) = diag(-i, +i)
        let r = SpinRepresentation::new(SpinJ::Half);
        let a = r.sz().map(|z| Complex64::new(0.0, -std::f64::consts::PI) * z);
        let u = expm_antihermitian(&a).unwrap();
        assert_abs_diff_eq!(u[(0, 0)].im, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u[(1, 1)].im, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(u[(0, 0)].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(max_abs(&DMatrix::from_row_slice(1, 2, &[u[(0, 1)], u[(1, 0)]])), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_rejects_non_antihermitian() {
        let m = DMatrix::<Complex64>::identity(2, 2);
        assert!(matches!(
            expm_antihermitian(&m),
            Err(Error::NotAntiHermitian { .. })
        ));
    }

    #[test]
    fn ladder_rotation_zero_is_identity() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            let u = ladder_rotation(Complex64::new(0.0, 0.0), &r).unwrap();
            assert!(max_abs(&(u - DMatrix::identity(j.dim(), j.dim()))) <= 1e-15);
        }
    }

    #[test]
    fn ladder_rotation_real_beta_is_y_rotation() {
        // beta = -theta/2 real gives exp(-i theta Sy)
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            for theta in [0.3, 1.0, 2.2] {
                let u = ladder_rotation(Complex64::new(-theta / 2.0, 0.0), &r).unwrap();
                let gen = r.sy().map(|z| Complex64::new(0.0, -theta) * z);
                let v = expm_antihermitian(&gen).unwrap();
                assert!(max_abs(&(&u - &v)) <= 1e-13);
                // and the closed-form route agrees
                assert!(max_abs(&(u - rotation_y(&r, theta))) <= 1e-13);
            }
        }
    }

    #[test]
    fn ladder_rotation_quarter_turn_matrix() {
        // beta = -pi/4: rotation by pi/2 about y for j = 1/2
        let r = SpinRepresentation::new(SpinJ::Half);
        let u = ladder_rotation(Complex64::new(-std::f64::consts::FRAC_PI_4, 0.0), &r).unwrap();
        let c = (std::f64::consts::FRAC_PI_4).cos();
        for (idx, expect) in [((0, 0), c), ((0, 1), -c), ((1, 0), c), ((1, 1), c)] {
            assert_abs_diff_eq!(u[idx].re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(u[idx].im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rotation_y_matches_expm_across_angles() {
        for j in [SpinJ::Half, SpinJ::One] {
            let r = SpinRepresentation::new(j);
            for k in 0..40 {
                let theta = -7.0 + k as f64 * 0.35;
                let gen = r.sy().map(|z| Complex64::new(0.0, -theta) * z);
                let via_expm = expm_antihermitian(&gen).unwrap();
                assert!(max_abs(&(via_expm - rotation_y(&r, theta))) <= 1e-13);
            }
        }
    }

    #[test]
    fn state_vector_norm_checked() {
        let bad = DVector::from_vec(vec![Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(matches!(
            StateVector::new(bad, SpinJ::Half),
            Err(Error::NotNormalized { .. })
        ));
        let good = DVector::from_vec(vec![
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
        ]);
        assert!(StateVector::new(good, SpinJ::Half).is_ok());
    }

    #[test]
    fn sigma_labels() {
        assert_eq!(HelicitySign::Plus.magnetic_number(SpinJ::One), 1.0);
        assert_eq!(HelicitySign::Minus.magnetic_number(SpinJ::Half), -0.5);
        assert_eq!(HelicitySign::Minus.basis_index(SpinJ::One), 2);
        assert!(matches!(
            HelicitySign::try_from_int(0),
            Err(Error::LongitudinalState)
        ));
    }

    proptest! {
        #[test]
        fn expm_is_unitary(entries in proptest::collection::vec(-3.0f64..3.0, 9)) {
            // random anti-Hermitian 3x3: A = (M - M')/2 + i*(N + N')/2 pattern
            let m = DMatrix::from_fn(3, 3, |r, c| {
                Complex64::new(entries[3 * r + c], entries[3 * c + r])
            });
            let a = (&m - m.adjoint()).map(|z| 0.5 * z);
            let u = expm_antihermitian(&a).unwrap();
            let err = (&u * u.adjoint() - DMatrix::identity(3, 3)).norm();
            prop_assert!(err < tol::UNITARITY);
        }

        #[test]
        fn ladder_rotation_dagger_negates_beta(re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let beta = Complex64::new(re, im);
            for j in [SpinJ::Half, SpinJ::One] {
                let r = SpinRepresentation::new(j);
                let u = ladder_rotation(beta, &r).unwrap();
                let v = ladder_rotation(-beta, &r).unwrap();
                prop_assert!(max_abs(&(u.adjoint() - v)) < tol::UNITARITY);
            }
        }

        #[test]
        fn ladder_rotation_real_betas_compose(b1 in -1.5f64..1.5, b2 in -1.5f64..1.5) {
            let r = SpinRepresentation::new(SpinJ::One);
            let u1 = ladder_rotation(Complex64::new(b1, 0.0), &r).unwrap();
            let u2 = ladder_rotation(Complex64::new(b2, 0.0), &r).unwrap();
            let u12 = ladder_rotation(Complex64::new(b1 + b2, 0.0), &r).unwrap();
            prop_assert!(max_abs(&(u1 * u2 - u12)) < 1e-12);
        }
    }
}

//! Evaluation of the QSP unitary `U(x, Ψ)` and of `g(x, Φ) = Im ⟨0|U|0⟩`.
//!
//! Two equivalent kernels are provided. The complex one multiplies 2×2 SU(2)
//! matrices and works for any phase sequence. The real one applies only to
//! symmetric sequences: there `U` is determined by the unit vector
//! `(Re P, Im P, √(1-x²)·Q)` and each pair of mirrored factors acts on it as
//! an SO(3) rotation `R_z(2φ_k) R_x(2 arccos x)`.

use num_complex::Complex64;

use crate::error::{QspError, Result};
use crate::types::{FullPhases, Parity, ReducedPhases};

pub(crate) fn check_domain(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 {
        Err(QspError::Domain(x))
    } else {
        Ok(())
    }
}

/// `√(1 - x²)`, clamped at zero for roundoff.
#[inline]
pub(crate) fn sqrt_one_minus_sq(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Matrix(pub [[Complex64; 2]; 2]);

impl Su2Matrix {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Su2Matrix([[one, zero], [zero, one]])
    }

    /// `e^{iψZ} = diag(e^{iψ}, e^{-iψ})`.
    pub fn z_rotation(psi: f64) -> Self {
        let e = Complex64::from_polar(1.0, psi);
        let zero = Complex64::new(0.0, 0.0);
        Su2Matrix([[e, zero], [zero, e.conj()]])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Su2Matrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Su2Matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Right-multiplication by `e^{iψZ}` given `e = e^{iψ}`.
    #[inline]
    fn mul_z_phase(&self, e: Complex64) -> Self {
        let m = &self.0;
        let ec = e.conj();
        Su2Matrix([[m[0][0] * e, m[0][1] * ec], [m[1][0] * e, m[1][1] * ec]])
    }
}

impl std::ops::Mul for Su2Matrix {
    type Output = Su2Matrix;

    fn mul(self, rhs: Su2Matrix) -> Su2Matrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Su2Matrix(out)
    }
}

/// Signal operator `W(x) = e^{i arccos(x) X}`.
pub fn w_matrix(x: f64) -> Result<Su2Matrix> {
    check_domain(x)?;
    Ok(w_unchecked(x, sqrt_one_minus_sq(x)))
}

#[inline]
pub(crate) fn w_unchecked(x: f64, s: f64) -> Su2Matrix {
    let d = Complex64::new(x, 0.0);
    let o = Complex64::new(0.0, s);
    Su2Matrix([[d, o], [o, d]])
}

/// `U(x, Ψ) = e^{iψ_0 Z} Π_{j=1}^{d} [W(x) e^{iψ_j Z}]`.
pub fn evaluate_u(x: f64, psi: &FullPhases) -> Result<Su2Matrix> {
    check_domain(x)?;
    let phases: Vec<Complex64> = psi
        .psi()
        .iter()
        .map(|&p| Complex64::from_polar(1.0, p))
        .collect();
    Ok(su2_product(x, &phases))
}

/// Product for precomputed `e^{iψ_j}`, rescaled to unit determinant. The
/// rounded factors share a `1 + O(ε)` determinant error that would otherwise
/// accumulate linearly with depth.
pub(crate) fn su2_product(x: f64, phases: &[Complex64]) -> Su2Matrix {
    let w = w_unchecked(x, sqrt_one_minus_sq(x));
    let mut u = Su2Matrix::z_rotation(0.0).mul_z_phase(phases[0]);
    for &e in &phases[1..] {
        u = (u * w).mul_z_phase(e);
    }
    let scale = u.det().norm().sqrt().recip();
    Su2Matrix(u.0.map(|row| row.map(|v| v * scale)))
}

#[inline]
fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `g(x, Ψ) = Im ⟨0|U(x, Ψ)|0⟩` for an arbitrary (possibly asymmetric) `Ψ`.
pub fn evaluate_g_full(x: f64, psi: &FullPhases) -> Result<f64> {
    Ok(evaluate_u(x, psi)?.entry(0, 0).im)
}

/// `g(x, Φ)` through the SU(2) product of the expanded sequence.
pub fn evaluate_g_complex(x: f64, phi: &ReducedPhases) -> Result<f64> {
    evaluate_g_full(x, &phi.to_full())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Matrix(pub [[f64; 3]; 3]);

impl So3Matrix {
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        So3Matrix([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }
}

impl std::ops::Mul for So3Matrix {
    type Output = So3Matrix;

    fn mul(self, rhs: So3Matrix) -> So3Matrix {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        So3Matrix(out)
    }
}

/// `R_z(2φ)`.
pub fn so3_rz(phi: f64) -> So3Matrix {
    let (s, c) = (2.0 * phi).sin_cos();
    So3Matrix([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
}

/// `R_x(2 arccos x)`, built from `cos 2θ = 2x² - 1` and `sin 2θ = 2x√(1-x²)`.
pub fn so3_rx(x: f64) -> Result<So3Matrix> {
    check_domain(x)?;
    let (c, s) = XRotation::new(x).cos_sin();
    Ok(So3Matrix([[c, 0.0, -s], [0.0, 1.0, 0.0], [s, 0.0, c]]))
}

/// Per-node data for `R_x(2 arccos x)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct XRotation {
    pub x: f64,
    pub sqrt: f64,
    cos2: f64,
    sin2: f64,
}

impl XRotation {
    #[inline]
    pub fn new(x: f64) -> Self {
        let sqrt = sqrt_one_minus_sq(x);
        Self {
            x,
            sqrt,
            cos2: 2.0 * x * x - 1.0,
            sin2: 2.0 * x * sqrt,
        }
    }

    pub fn cos_sin(&self) -> (f64, f64) {
        (self.cos2, self.sin2)
    }

    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        [
            self.cos2 * v[0] - self.sin2 * v[2],
            v[1],
            self.sin2 * v[0] + self.cos2 * v[2],
        ]
    }

    /// Row vector times `R_x`.
    #[inline]
    pub fn apply_left(&self, r: [f64; 3]) -> [f64; 3] {
        [
            r[0] * self.cos2 + r[2] * self.sin2,
            r[1],
            -r[0] * self.sin2 + r[2] * self.cos2,
        ]
    }

    /// Row vector times `R_x^{-1} = R_x^T`.
    #[inline]
    pub fn apply_left_inverse(&self, r: [f64; 3]) -> [f64; 3] {
        [
            r[0] * self.cos2 - r[2] * self.sin2,
            r[1],
            r[0] * self.sin2 + r[2] * self.cos2,
        ]
    }

    /// Unrotated base vector: `(1, 0, 0)` for even degree,
    /// `(x, 0, √(1-x²))` for odd degree.
    #[inline]
    pub fn base(&self, parity: Parity) -> [f64; 3] {
        match parity {
            Parity::Even => [1.0, 0.0, 0.0],
            Parity::Odd => [self.x, 0.0, self.sqrt],
        }
    }
}

/// `(cos 2φ, sin 2φ)` for one phase.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ZRotation {
    pub cos2: f64,
    pub sin2: f64,
}

impl ZRotation {
    #[inline]
    pub fn new(phi: f64) -> Self {
        let (sin2, cos2) = (2.0 * phi).sin_cos();
        Self { cos2, sin2 }
    }

    #[inline]
    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        [
            self.cos2 * v[0] - self.sin2 * v[1],
            self.sin2 * v[0] + self.cos2 * v[1],
            v[2],
        ]
    }

    /// Row vector times `R_z(2φ)`.
    #[inline]
    pub fn apply_left(&self, r: [f64; 3]) -> [f64; 3] {
        [
            r[0] * self.cos2 + r[1] * self.sin2,
            -r[0] * self.sin2 + r[1] * self.cos2,
            r[2],
        ]
    }

    /// Row vector times `R_z(-2φ)`.
    #[inline]
    pub fn apply_left_inverse(&self, r: [f64; 3]) -> [f64; 3] {
        [
            r[0] * self.cos2 - r[1] * self.sin2,
            r[0] * self.sin2 + r[1] * self.cos2,
            r[2],
        ]
    }

    /// `r · (d/dφ R_z(2φ)) · v`. The derivative annihilates the z axis.
    #[inline]
    pub fn derivative_form(&self, r: [f64; 3], v: [f64; 3]) -> f64 {
        let (c, s) = (self.cos2, self.sin2);
        2.0 * (r[0] * (-s * v[0] - c * v[1]) + r[1] * (c * v[0] - s * v[1]))
    }
}

/// The symmetric QSP state `(Re P, Im P, √(1-x²)·Q)` on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3State {
    pub a: f64,
    pub g: f64,
    pub alpha: f64,
}

impl So3State {
    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.g * self.g + self.alpha * self.alpha).sqrt()
    }

    fn from_array(v: [f64; 3]) -> Self {
        Self {
            a: v[0],
            g: v[1],
            alpha: v[2],
        }
    }
}

/// Real-arithmetic evaluator for a fixed `Φ`, reusable across nodes.
#[derive(Debug, Clone)]
pub struct So3Kernel {
    parity: Parity,
    rotations: Vec<ZRotation>,
}

impl So3Kernel {
    pub fn new(phi: &ReducedPhases) -> Self {
        Self {
            parity: phi.parity(),
            rotations: phi.phases().iter().map(|&p| ZRotation::new(p)).collect(),
        }
    }

    /// Full state after all `d̃` steps of the recurrence, without the norm
    /// correction applied by [`So3Kernel::g`].
    pub fn state(&self, x: f64) -> Result<So3State> {
        check_domain(x)?;
        let xr = XRotation::new(x);
        let mut v = self.rotations[0].apply(xr.base(self.parity));
        for z in &self.rotations[1..] {
            v = z.apply(xr.apply(v));
        }
        Ok(So3State::from_array(v))
    }

    /// `g(x, Φ)`; the last step contracts with `(sin 2φ, cos 2φ, 0)`
    /// instead of applying the full z rotation.
    #[inline]
    pub fn g(&self, x: f64) -> Result<f64> {
        check_domain(x)?;
        Ok(self.g_unchecked(&XRotation::new(x)))
    }

    /// The state is divided by its norm before the final contraction. Each
    /// rounded rotation scales the norm by the same `1 + O(ε)` factor, so
    /// the drift grows linearly with depth; the true state is a unit vector.
    #[inline]
    pub(crate) fn g_unchecked(&self, xr: &XRotation) -> f64 {
        let n = self.rotations.len();
        let mut v = self.rotations[0].apply(xr.base(self.parity));
        if n == 1 {
            return v[1] / norm3(v);
        }
        for z in &self.rotations[1..n - 1] {
            v = z.apply(xr.apply(v));
        }
        let v = xr.apply(v);
        let last = self.rotations[n - 1];
        (last.sin2 * v[0] + last.cos2 * v[1]) / norm3(v)
    }
}

/// Complex-arithmetic evaluator for a fixed `Ψ`, reusable across nodes.
#[derive(Debug, Clone)]
pub struct Su2Kernel {
    phases: Vec<Complex64>,
}

impl Su2Kernel {
    pub fn new(psi: &FullPhases) -> Self {
        Self {
            phases: psi
                .psi()
                .iter()
                .map(|&p| Complex64::from_polar(1.0, p))
                .collect(),
        }
    }

    pub fn u(&self, x: f64) -> Result<Su2Matrix> {
        check_domain(x)?;
        Ok(su2_product(x, &self.phases))
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        Ok(self.u(x)?.entry(0, 0).im)
    }
}

/// `g(x, Φ)` through the SO(3) recurrence.
pub fn evaluate_g_real(x: f64, phi: &ReducedPhases) -> Result<f64> {
    So3Kernel::new(phi).g(x)
}

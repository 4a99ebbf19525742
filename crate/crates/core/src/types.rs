//! Phase-factor and coefficient vectors shared across the crate.
//!
//! A symmetric phase-factor sequence `Ψ = (ψ_0, …, ψ_d)` is fully determined
//! by its reduced half `Φ = (φ_0, …, φ_{d̃-1})` together with the parity of
//! `d`. For even `d` the center phase is `2φ_0`; for odd `d` the two center
//! entries are both `φ_0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{QspError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(d: usize) -> Self {
        if d.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `0` for even, `1` for odd.
    pub fn bit(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// Full polynomial degree induced by `reduced_len` reduced entries.
    pub fn full_degree(self, reduced_len: usize) -> usize {
        2 * reduced_len - 2 + self.bit()
    }

    /// Chebyshev index of the `j`-th coefficient (`2j` or `2j + 1`).
    pub fn chebyshev_index(self, j: usize) -> usize {
        2 * j + self.bit()
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// The unknown of the phase-factor problem: the independent half of a
/// symmetric phase-factor sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedPhases {
    parity: Parity,
    phases: Vec<f64>,
}

impl ReducedPhases {
    pub fn new(parity: Parity, phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(QspError::InvalidInput(
                "reduced phase factors must have at least one entry".into(),
            ));
        }
        Ok(Self { parity, phases })
    }

    pub fn zeros(parity: Parity, len: usize) -> Result<Self> {
        Self::new(parity, vec![0.0; len])
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn phases_mut(&mut self) -> &mut [f64] {
        &mut self.phases
    }

    pub fn into_phases(self) -> Vec<f64> {
        self.phases
    }

    /// Number of reduced phases `d̃`.
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// Degree `d` of the induced polynomial.
    pub fn degree(&self) -> usize {
        self.parity.full_degree(self.phases.len())
    }

    /// Expands to the full symmetric sequence `Ψ`.
    pub fn to_full(&self) -> FullPhases {
        let n = self.phases.len();
        let mut psi = Vec::with_capacity(self.degree() + 1);
        psi.extend(self.phases[1..].iter().rev());
        match self.parity {
            Parity::Even => psi.push(2.0 * self.phases[0]),
            Parity::Odd => {
                psi.push(self.phases[0]);
                psi.push(self.phases[0]);
            }
        }
        psi.extend(&self.phases[1..n]);
        FullPhases {
            psi,
            symmetric: true,
        }
    }

    /// Reduces every entry into `[-π/2, π/2)`.
    ///
    /// Adding `π` to a mirrored pair multiplies the product by `(-1)^2`, and
    /// adding `π` to `φ_0` in the even case moves the center phase `2φ_0` by
    /// `2π`; both leave the unitary unchanged. The result therefore lies in the
    /// canonical domain where the symmetric solution is unique.
    pub fn canonicalized(&self) -> Self {
        let phases = self
            .phases
            .iter()
            .map(|&p| (p + PI / 2.0).rem_euclid(PI) - PI / 2.0)
            .collect();
        Self {
            parity: self.parity,
            phases,
        }
    }
}

/// A full phase-factor sequence `Ψ`, not necessarily symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct FullPhases {
    psi: Vec<f64>,
    symmetric: bool,
}

impl FullPhases {
    /// Wraps an arbitrary sequence; the symmetric flag is set only if the
    /// entries mirror bit-for-bit.
    pub fn new(psi: Vec<f64>) -> Result<Self> {
        if psi.is_empty() {
            return Err(QspError::InvalidInput("phase sequence is empty".into()));
        }
        let symmetric = psi
            .iter()
            .zip(psi.iter().rev())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        Ok(Self { psi, symmetric })
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn degree(&self) -> usize {
        self.psi.len() - 1
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Copy with `ψ_k += delta`.
    pub fn shifted(&self, k: usize, delta: f64) -> Result<Self> {
        if k >= self.psi.len() {
            return Err(QspError::IndexOutOfRange {
                index: k,
                len: self.psi.len(),
            });
        }
        let mut psi = self.psi.clone();
        psi[k] += delta;
        let mirror = self.psi.len() - 1 - k;
        let symmetric = self.symmetric && mirror == k;
        Ok(Self { psi, symmetric })
    }

    /// Shifts both edge phases by `π/4`, exchanging the real and imaginary
    /// parts of `⟨0|U|0⟩`: `Re U(Ψ)_{00} = Im U(Ψ')_{00}`.
    pub fn edges_shifted_for_real_part(&self) -> Self {
        let mut psi = self.psi.clone();
        let last = psi.len() - 1;
        psi[0] += PI / 4.0;
        psi[last] += PI / 4.0;
        let symmetric = self.symmetric && last != 0;
        Self { psi, symmetric }
    }

    /// Recovers the reduced half of a symmetric sequence.
    pub fn to_reduced(&self) -> Result<ReducedPhases> {
        if !self.symmetric {
            return Err(QspError::InvalidInput(
                "only symmetric phase factors have a reduced form".into(),
            ));
        }
        let d = self.degree();
        let parity = Parity::of_degree(d);
        let reduced_len = (d + 2 - parity.bit()) / 2;
        let center = reduced_len - 1;
        let mut phases = Vec::with_capacity(reduced_len);
        match parity {
            Parity::Even => phases.push(0.5 * self.psi[center]),
            Parity::Odd => phases.push(self.psi[center]),
        }
        phases.extend(self.psi[..center].iter().rev());
        ReducedPhases::new(parity, phases)
    }
}

/// Chebyshev coefficients `c` of a definite-parity polynomial:
/// `f = Σ_j c_j T_{2j}` (even) or `f = Σ_j c_j T_{2j+1}` (odd).
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoeffs {
    parity: Parity,
    coeffs: Vec<f64>,
}

impl ChebCoeffs {
    pub fn new(parity: Parity, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(QspError::InvalidInput(
                "coefficient vector must have at least one entry".into(),
            ));
        }
        Ok(Self { parity, coeffs })
    }

    pub fn zeros(parity: Parity, len: usize) -> Result<Self> {
        Self::new(parity, vec![0.0; len])
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.parity.full_degree(self.coeffs.len())
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            parity: self.parity,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub(crate) fn check_compatible(&self, other_parity: Parity, other_len: usize) -> Result<()> {
        if self.parity != other_parity {
            return Err(QspError::ParityMismatch);
        }
        if self.coeffs.len() != other_len {
            return Err(QspError::LengthMismatch {
                expected: other_len,
                actual: self.coeffs.len(),
            });
        }
        Ok(())
    }
}

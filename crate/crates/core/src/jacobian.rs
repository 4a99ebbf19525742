//! Jacobian `DF(Φ)` of the phase-to-coefficient map.
//!
//! Column `i` is the coefficient vector of `∂g/∂φ_i`. Differentiating the
//! `i`-th phase inserts one `iZ` into the product, so with the chain split
//! into a left part and a right part around `φ_i`, all `d̃` derivative
//! samples at a node cost one sweep: the left part shrinks and the right
//! part grows by one factor per step.
//!
//! The sweep state at a node is a handful of numbers, so rows can be
//! produced in panels: each panel of samples is small enough to stay in
//! cache while its rows are mapped to coefficients and written out.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chebyshev::{HalfGridExtractor, SampleGrid};
use crate::error::Result;
use crate::eval::{sqrt_one_minus_sq, XRotation, ZRotation};
use crate::linalg::Matrix;
use crate::solvers::evaluate_f;
use crate::types::{Parity, ReducedPhases};

/// Dense `d̃ × d̃` matrix whose column `i` is `∂F/∂φ_i`.
pub type JacobianMatrix = Matrix;

/// Default central-difference step for [`jacobian_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Nodes swept side by side; the node loop is innermost so the per-node
/// arithmetic vectorizes and each row of a block is written contiguously.
const NODE_BLOCK: usize = 64;
/// Rows per panel.
const PANEL: usize = 128;

/// A left/right sweep over the phases at one node.
trait Sweep: Sync {
    type State: Copy + Send + Sync;

    fn len(&self) -> usize;
    /// State positioned at row 0.
    fn start(&self, x: f64) -> Self::State;
    /// Moves the state from row `i - 1` to row `i`.
    fn advance(&self, state: &mut Self::State, i: usize);
    /// The derivative sample at the current row `i`.
    fn sample(&self, state: &Self::State, i: usize) -> f64;
}

/// SO(3) left covector and right vector.
struct RealSweep {
    z: Vec<ZRotation>,
    parity: Parity,
}

impl RealSweep {
    fn new(phi: &ReducedPhases) -> Self {
        Self {
            z: phi.phases().iter().map(|&p| ZRotation::new(p)).collect(),
            parity: phi.parity(),
        }
    }
}

impl Sweep for RealSweep {
    type State = ([f64; 3], [f64; 3], XRotation);

    fn len(&self) -> usize {
        self.z.len()
    }

    fn start(&self, x: f64) -> Self::State {
        let xr = XRotation::new(x);
        // (0, 1, 0) · R_z(2φ_{n-1}) R_x · R_z(2φ_{n-2}) R_x ⋯ R_z(2φ_1) R_x
        let mut left = [0.0, 1.0, 0.0];
        for rot in self.z[1..].iter().rev() {
            left = xr.apply_left(rot.apply_left(left));
        }
        (left, xr.base(self.parity), xr)
    }

    #[inline]
    fn advance(&self, (left, right, xr): &mut Self::State, i: usize) {
        *left = self.z[i].apply_left_inverse(xr.apply_left_inverse(*left));
        *right = xr.apply(self.z[i - 1].apply(*right));
    }

    #[inline]
    fn sample(&self, (left, right, _): &Self::State, i: usize) -> f64 {
        self.z[i].derivative_form(*left, *right)
    }
}

type Row2 = [Complex64; 2];

#[inline]
fn row_times_w(r: Row2, x: f64, is: Complex64) -> Row2 {
    [r[0] * x + r[1] * is, r[0] * is + r[1] * x]
}

#[inline]
fn row_times_z(r: Row2, e: Complex64) -> Row2 {
    [r[0] * e, r[1] * e.conj()]
}

/// SU(2) left row and right column.
struct ComplexSweep {
    e: Vec<Complex64>,
    center: Complex64,
    parity: Parity,
}

impl ComplexSweep {
    fn new(phi: &ReducedPhases) -> Self {
        Self {
            e: phi
                .phases()
                .iter()
                .map(|&p| Complex64::from_polar(1.0, p))
                .collect(),
            center: Complex64::from_polar(1.0, 2.0 * phi.phases()[0]),
            parity: phi.parity(),
        }
    }
}

impl Sweep for ComplexSweep {
    /// Left row, right column, `x`, `i√(1-x²)`.
    type State = (Row2, Row2, f64, Complex64);

    fn len(&self) -> usize {
        self.e.len()
    }

    fn start(&self, x: f64) -> Self::State {
        let is = Complex64::new(0.0, sqrt_one_minus_sq(x));
        let e = &self.e;
        // Left row vector: (1, 0) · e^{iφ_{n-1}Z} W ⋯ e^{iφ_1 Z} W.
        let mut left: Row2 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        for &ek in e[1..].iter().rev() {
            left = row_times_w(row_times_z(left, ek), x, is);
        }
        // The right half mirrors the left half, so its column vector is the
        // transpose of `left`; prepend the center factor(s). Applying a
        // diagonal or symmetric factor on the left of a column is the same
        // arithmetic as on a row.
        let right = match self.parity {
            Parity::Even => row_times_z(left, self.center),
            Parity::Odd => row_times_z(row_times_w(row_times_z(left, e[0]), x, is), e[0]),
        };
        (left, right, x, is)
    }

    #[inline]
    fn advance(&self, (left, right, x, is): &mut Self::State, i: usize) {
        // left ← left · W⁻¹ · e^{-iφ_i Z}
        *left = row_times_z(row_times_w(*left, *x, -*is), self.e[i].conj());
        // right ← e^{iφ_i Z} · W · right
        *right = row_times_z(row_times_w(*right, *x, *is), self.e[i]);
    }

    #[inline]
    fn sample(&self, (left, right, _, _): &Self::State, _i: usize) -> f64 {
        // 2 Im[l · iZ · r] = 2 Re[l_0 r_0 - l_1 r_1]
        2.0 * (left[0] * right[0] - left[1] * right[1]).re
    }
}

/// Per-node sweep states for every node, grouped in node blocks.
struct PanelSweeper<'a, S: Sweep> {
    sweep: &'a S,
    states: Vec<Vec<S::State>>,
}

impl<'a, S: Sweep> PanelSweeper<'a, S> {
    fn new(sweep: &'a S, nodes: &[f64]) -> Self {
        let states = nodes
            .par_chunks(NODE_BLOCK)
            .map(|xs| xs.iter().map(|&x| sweep.start(x)).collect())
            .collect();
        Self { sweep, states }
    }

    /// Samples for rows `rows`, advancing the states past them. Block `b`
    /// of the result holds an `rows.len() × w` row-major array.
    fn panel(&mut self, rows: std::ops::Range<usize>) -> Vec<Vec<f64>> {
        let sweep = self.sweep;
        self.states
            .par_iter_mut()
            .map(|states| {
                let w = states.len();
                let mut block = vec![0.0; rows.len() * w];
                for (r, i) in rows.clone().enumerate() {
                    if i > 0 {
                        for st in states.iter_mut() {
                            sweep.advance(st, i);
                        }
                    }
                    let out = &mut block[r * w..(r + 1) * w];
                    for (o, st) in out.iter_mut().zip(states.iter()) {
                        *o = sweep.sample(st, i);
                    }
                }
                block
            })
            .collect()
    }
}

/// Copies row `r` of a panel (all nodes) into `out`.
fn panel_row(blocks: &[Vec<f64>], rows: usize, r: usize, out: &mut [f64]) {
    let mut j0 = 0;
    for block in blocks {
        let w = block.len() / rows;
        out[j0..j0 + w].copy_from_slice(&block[r * w..(r + 1) * w]);
        j0 += w;
    }
}

/// All derivative samples at `nodes`: row `i`, node `j`.
fn sample_matrix<S: Sweep>(sweep: &S, nodes: &[f64]) -> Matrix {
    let n = sweep.len();
    let mut samples = Matrix::zeros(n, nodes.len());
    if n == 0 || nodes.is_empty() {
        return samples;
    }
    let mut sweeper = PanelSweeper::new(sweep, nodes);
    let blocks = sweeper.panel(0..n);
    for (r, row) in samples.as_mut_slice().chunks_mut(nodes.len()).enumerate() {
        panel_row(&blocks, n, r, row);
    }
    samples
}

/// Derivative samples `∂g(x_j, Φ)/∂φ_i` on [`SampleGrid`] as a
/// `d̃ × (d+1)` matrix (row `i`, node `j`), computed with SO(3) left
/// covectors and right vectors.
pub fn derivative_samples_real(phi: &ReducedPhases) -> Matrix {
    derivative_samples_real_at(phi, SampleGrid::new(phi.degree()).nodes())
}

/// [`derivative_samples_real`] at arbitrary nodes in `[-1, 1]`.
pub fn derivative_samples_real_at(phi: &ReducedPhases, nodes: &[f64]) -> Matrix {
    sample_matrix(&RealSweep::new(phi), nodes)
}

/// Same samples as [`derivative_samples_real`] from SU(2) partial products.
pub fn derivative_samples_complex(phi: &ReducedPhases) -> Matrix {
    derivative_samples_complex_at(phi, SampleGrid::new(phi.degree()).nodes())
}

/// [`derivative_samples_complex`] at arbitrary nodes in `[-1, 1]`.
pub fn derivative_samples_complex_at(phi: &ReducedPhases, nodes: &[f64]) -> Matrix {
    sample_matrix(&ComplexSweep::new(phi), nodes)
}

/// Sweeps panel by panel; each panel's rows are mapped to coefficients and
/// written as the matching columns of the Jacobian.
fn assemble<S: Sweep>(sweep: &S, parity: Parity) -> Result<JacobianMatrix> {
    let n = sweep.len();
    let extractor = HalfGridExtractor::new(parity.full_degree(n), parity)?;
    let k = extractor.grid_size();
    let out_len = extractor.output_len();
    let mut jacobian = Matrix::zeros(out_len, n);
    let mut sweeper = PanelSweeper::new(sweep, &extractor.nodes());
    for p0 in (0..n).step_by(PANEL) {
        let rows = PANEL.min(n - p0);
        let blocks = sweeper.panel(p0..p0 + rows);
        // coefficients[r * out_len + l] for panel row r
        let pairs: Vec<usize> = (0..rows).step_by(2).collect();
        let coefficients: Vec<Vec<f64>> = pairs
            .par_iter()
            .map_init(
                || (extractor.scratch(), vec![0.0; k], vec![0.0; k]),
                |(scratch, first, second), &r| {
                    panel_row(&blocks, rows, r, first);
                    if r + 1 < rows {
                        panel_row(&blocks, rows, r + 1, second);
                    }
                    extractor.extract_pair_in_place(first, second, scratch)?;
                    let mut out = first[..out_len].to_vec();
                    if r + 1 < rows {
                        out.extend_from_slice(&second[..out_len]);
                    }
                    Ok(out)
                },
            )
            .collect::<Result<_>>()?;
        let coefficients = coefficients.concat();
        let data = jacobian.as_mut_slice();
        for l in 0..out_len {
            let dst = &mut data[l * n + p0..l * n + p0 + rows];
            for (r, v) in dst.iter_mut().enumerate() {
                *v = coefficients[r * out_len + l];
            }
        }
    }
    Ok(jacobian)
}

/// `DF(Φ)` via the SO(3) sweep.
pub fn jacobian_mps_real(phi: &ReducedPhases) -> Result<JacobianMatrix> {
    assemble(&RealSweep::new(phi), phi.parity())
}

/// `DF(Φ)` via the SU(2) sweep.
pub fn jacobian_mps_complex(phi: &ReducedPhases) -> Result<JacobianMatrix> {
    assemble(&ComplexSweep::new(phi), phi.parity())
}

/// Central differences `(F(Φ + h e_i) - F(Φ - h e_i)) / 2h`.
pub fn jacobian_fd(phi: &ReducedPhases, h: f64) -> Result<JacobianMatrix> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let n = phi.len();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut plus = phi.clone();
            plus.phases_mut()[i] += h;
            let mut minus = phi.clone();
            minus.phases_mut()[i] -= h;
            let fp = evaluate_f(&plus);
            let fm = evaluate_f(&minus);
            fp.coeffs()
                .iter()
                .zip(fm.coeffs())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect();
    Matrix::from_columns(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::evaluate_g_full;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_phi(seed: u64, parity: Parity, len: usize, spread: f64) -> ReducedPhases {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..len).map(|_| rng.gen_range(-spread..spread)).collect();
        ReducedPhases::new(parity, v).unwrap()
    }

    #[test]
    fn jacobian_at_zero_is_twice_identity() {
        for parity in [Parity::Even, Parity::Odd] {
            for len in [1, 2, 4, 7] {
                let phi = ReducedPhases::zeros(parity, len).unwrap();
                let two = Matrix::identity(len).scaled(2.0);
                assert!(jacobian_mps_real(&phi).unwrap().max_abs_diff(&two) <= 1e-12);
                assert!(jacobian_mps_complex(&phi).unwrap().max_abs_diff(&two) <= 1e-12);
                assert!(
                    jacobian_fd(&phi, DEFAULT_FD_STEP)
                        .unwrap()
                        .max_abs_diff(&two)
                        <= 1e-8
                );
            }
        }
    }

    #[test]
    fn scalar_case() {
        let phi0 = 0.37;
        let phi = ReducedPhases::new(Parity::Even, vec![phi0]).unwrap();
        let expect = 2.0 * (2.0 * phi0).cos();
        assert!((jacobian_mps_complex(&phi).unwrap()[(0, 0)] - expect).abs() < 1e-14);
        assert!((jacobian_mps_real(&phi).unwrap()[(0, 0)] - expect).abs() < 1e-14);
    }

    #[test]
    fn samples_match_shifted_sequence() {
        for parity in [Parity::Even, Parity::Odd] {
            let phi = random_phi(31, parity, 9, PI);
            let full = phi.to_full();
            let grid = SampleGrid::new(phi.degree());
            let real = derivative_samples_real(&phi);
            let complex = derivative_samples_complex(&phi);
            for i in 0..phi.len() {
                let shifted = full.shifted(phi.len() - 1 - i, PI / 2.0).unwrap();
                for (j, &x) in grid.nodes().iter().enumerate() {
                    let expect = 2.0 * evaluate_g_full(x, &shifted).unwrap();
                    assert!((real[(i, j)] - expect).abs() <= 1e-12);
                    assert!((complex[(i, j)] - expect).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn mps_matches_finite_differences() {
        for parity in [Parity::Even, Parity::Odd] {
            let phi = random_phi(40, parity, 30, 0.5);
            let fd = jacobian_fd(&phi, DEFAULT_FD_STEP).unwrap();
            let complex = jacobian_mps_complex(&phi).unwrap();
            let real = jacobian_mps_real(&phi).unwrap();
            assert!(complex.relative_frobenius_error(&fd) <= 1e-6);
            assert!(real.relative_frobenius_error(&fd) <= 1e-6);
            assert!(real.max_abs_diff(&complex) <= 1e-12);
        }
    }

    #[test]
    fn columns_are_parity_consistent_coefficient_vectors() {
        let phi = random_phi(41, Parity::Odd, 6, 0.4);
        let fd = jacobian_fd(&phi, DEFAULT_FD_STEP).unwrap();
        assert_eq!((fd.rows(), fd.cols()), (6, 6));
    }
}

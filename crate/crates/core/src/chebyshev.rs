//! Sampling grid, coefficient extraction and Chebyshev series evaluation.
//!
//! Coefficients are extracted from samples at `x_j = cos(2πj/(2d+1))`,
//! `j = 0..=d`. Mirroring the samples gives a symmetric sequence of odd
//! length `n = 2d+1` whose DFT is real; entry `l` of that DFT equals
//! `n/2 · a_l` (`n · a_0` for `l = 0`) where `a_l` is the coefficient of
//! `T_l`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{QspError, Result};
use crate::eval::check_domain;
use crate::types::{ChebCoeffs, Parity};

/// Nodes `x_j = cos(2πj/(2d+1))` for `j = 0..=d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    degree: usize,
    nodes: Vec<f64>,
}

impl SampleGrid {
    pub fn new(degree: usize) -> Self {
        let n = (2 * degree + 1) as f64;
        let nodes = (0..=degree)
            .map(|j| (2.0 * PI * j as f64 / n).cos())
            .collect();
        Self { degree, nodes }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Exact DFT `X_l = Σ_j v_j e^{-2πi jl/n}` for odd `n`.
pub fn dft_odd_length(v: &[f64]) -> Result<Vec<Complex64>> {
    if v.len().is_multiple_of(2) {
        return Err(QspError::InvalidInput(format!(
            "DFT length must be odd, got {}",
            v.len()
        )));
    }
    let mut buf: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    FftPlanner::new()
        .plan_fft_forward(v.len())
        .process(&mut buf);
    Ok(buf)
}

/// Samples-to-coefficients map for a fixed degree, with the FFT planned once.
pub struct CoefficientExtractor {
    degree: usize,
    parity: Parity,
    fft: Arc<dyn Fft<f64>>,
}

impl CoefficientExtractor {
    pub fn new(degree: usize, parity: Parity) -> Result<Self> {
        if degree % 2 != parity.bit() {
            return Err(QspError::InvalidInput(format!(
                "degree {degree} does not have {parity} parity"
            )));
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * degree + 1);
        Ok(Self {
            degree,
            parity,
            fft,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of coefficients produced, `d̃`.
    pub fn output_len(&self) -> usize {
        (self.degree + 2 - self.parity.bit()) / 2
    }

    fn fill_mirrored(&self, samples: &[f64], buf: &mut [Complex64], imag: bool) {
        let n = buf.len();
        for (j, &s) in samples.iter().enumerate() {
            let put = |c: &mut Complex64| {
                if imag {
                    c.im = s
                } else {
                    c.re = s
                }
            };
            put(&mut buf[j]);
            if j > 0 {
                put(&mut buf[n - j]);
            }
        }
    }

    fn pick(&self, spectrum: impl Fn(usize) -> f64) -> Vec<f64> {
        let scale = 2.0 / (2 * self.degree + 1) as f64;
        (0..self.output_len())
            .map(|j| {
                let l = self.parity.chebyshev_index(j);
                let v = spectrum(l) * scale;
                if l == 0 {
                    0.5 * v
                } else {
                    v
                }
            })
            .collect()
    }

    fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.degree + 1 {
            return Err(QspError::LengthMismatch {
                expected: self.degree + 1,
                actual: samples.len(),
            });
        }
        Ok(())
    }

    pub fn extract(&self, samples: &[f64]) -> Result<ChebCoeffs> {
        self.check_len(samples)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.degree + 1];
        self.fill_mirrored(samples, &mut buf, false);
        self.fft.process(&mut buf);
        ChebCoeffs::new(self.parity, self.pick(|l| buf[l].re))
    }

    /// Two sample rows through one complex FFT. Each mirrored row has a
    /// real spectrum, so the first lands in the real part and the second in
    /// the imaginary part.
    pub fn extract_pair(&self, first: &[f64], second: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_len(first)?;
        self.check_len(second)?;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.degree + 1];
        self.fill_mirrored(first, &mut buf, false);
        self.fill_mirrored(second, &mut buf, true);
        self.fft.process(&mut buf);
        Ok((self.pick(|l| buf[l].re), self.pick(|l| buf[l].im)))
    }
}

/// Smallest `k ≥ min_k` with no prime factor above 7.
fn smooth_size(min_k: usize) -> usize {
    let smooth = |mut n: usize| {
        for p in [2, 3, 5, 7] {
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        n == 1
    };
    (min_k.max(1)..)
        .find(|&k| smooth(k))
        .expect("smooth sizes are unbounded")
}

/// Coefficient extraction on the nonnegative half of a Chebyshev-Gauss grid.
///
/// Any grid that determines a degree-`d` polynomial recovers the same
/// coefficients. On the `2K` nodes `x_n = cos θ_n`, `θ_n = π(2n+1)/(4K)`, a
/// parity-`p` function needs samples only at the `K` nonnegative ones:
///
/// - even: `f(x_n) = Σ a_{2k} cos(2kθ_n)` is a DCT-II in `n`;
/// - odd: `2x_n f(x_n)` is even, and `cos((2k+1)θ) = 2cos θ cos 2kθ −
///   cos((2k−1)θ)` turns its DCT-II into the odd coefficients by a running
///   difference.
///
/// Each DCT-II is one length-`K` complex FFT of the reordered samples, and
/// two real rows share one FFT. `K ≥ d̃` is rounded up to a size with small
/// prime factors. The Jacobian uses this for its `d̃` rows; [`SampleGrid`]
/// lengths `2d+1` are often prime and need a full complex FFT each.
pub struct HalfGridExtractor {
    degree: usize,
    parity: Parity,
    k: usize,
    nodes: Vec<f64>,
    /// `e^{-iπl/(2K)}`, the DCT-II output twiddles.
    twiddles: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
}

/// Work buffers for [`HalfGridExtractor::extract_pair_in_place`].
pub struct HalfGridScratch {
    buf: Vec<Complex64>,
    fft: Vec<Complex64>,
}

impl HalfGridExtractor {
    pub fn new(degree: usize, parity: Parity) -> Result<Self> {
        if degree % 2 != parity.bit() {
            return Err(QspError::InvalidInput(format!(
                "degree {degree} does not have {parity} parity"
            )));
        }
        let k = smooth_size((degree + 2 - parity.bit()) / 2);
        let kf = k as f64;
        let nodes = (0..k)
            .map(|n| (PI * (2 * n + 1) as f64 / (4.0 * kf)).cos())
            .collect();
        let twiddles = (0..k)
            .map(|l| Complex64::from_polar(1.0, -PI * l as f64 / (2.0 * kf)))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(k);
        Ok(Self {
            degree,
            parity,
            k,
            nodes,
            twiddles,
            fft,
        })
    }

    /// Number of sample nodes `K`.
    pub fn grid_size(&self) -> usize {
        self.k
    }

    /// The nodes `cos(π(2n+1)/(4K))`, `n = 0..K`, in decreasing order.
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }

    pub fn output_len(&self) -> usize {
        (self.degree + 2 - self.parity.bit()) / 2
    }

    pub fn scratch(&self) -> HalfGridScratch {
        HalfGridScratch {
            buf: vec![Complex64::new(0.0, 0.0); self.k],
            fft: vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()],
        }
    }

    /// Maps samples at [`Self::nodes`] to the parity-reduced coefficients.
    pub fn extract(&self, samples: &[f64]) -> Result<Vec<f64>> {
        let mut a = samples.to_vec();
        let mut b = vec![0.0; samples.len()];
        self.extract_pair_in_place(&mut a, &mut b, &mut self.scratch())?;
        a.truncate(self.output_len());
        Ok(a)
    }

    /// Two rows through one FFT, without allocation: the coefficients
    /// overwrite the leading [`Self::output_len`] entries of each row; the
    /// rest is unspecified.
    pub fn extract_pair_in_place(
        &self,
        first: &mut [f64],
        second: &mut [f64],
        scratch: &mut HalfGridScratch,
    ) -> Result<()> {
        let k = self.k;
        for row in [&*first, &*second] {
            if row.len() != k {
                return Err(QspError::LengthMismatch {
                    expected: k,
                    actual: row.len(),
                });
            }
        }
        let odd = self.parity == Parity::Odd;
        let weight = |n: usize| if odd { 2.0 * self.nodes[n] } else { 1.0 };
        // Reorder: v_m = y_{2m}, v_{K-1-m} = y_{2m+1}.
        let buf = &mut scratch.buf;
        for n in 0..k {
            let m = if n % 2 == 0 { n / 2 } else { k - 1 - n / 2 };
            let w = weight(n);
            buf[m] = Complex64::new(w * first[n], w * second[n]);
        }
        self.fft.process_with_scratch(buf, &mut scratch.fft);

        // Split the packed spectrum and apply the DCT-II twiddles.
        let scale = 2.0 / k as f64;
        for l in 0..self.output_len() {
            let v = buf[l];
            let w = buf[(k - l) % k].conj();
            let va = 0.5 * (v + w);
            let vb = Complex64::new(0.0, -0.5) * (v - w);
            first[l] = (self.twiddles[l] * va).re;
            second[l] = (self.twiddles[l] * vb).re;
        }
        for row in [first, second] {
            let row = &mut row[..self.output_len()];
            row[0] *= 0.5;
            if odd {
                // X_0 = Y_0/2, X_l = Y_l - X_{l-1}
                for l in 1..row.len() {
                    row[l] -= row[l - 1];
                }
            }
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        Ok(())
    }
}

/// Chebyshev coefficients of the degree-`d` polynomial sampled on
/// [`SampleGrid`], with `d = samples.len() - 1` required to match `parity`.
pub fn coefficients_from_samples(samples: &[f64], parity: Parity) -> Result<ChebCoeffs> {
    if samples.is_empty() {
        return Err(QspError::InvalidInput("no samples".into()));
    }
    let degree = samples.len() - 1;
    if degree % 2 != parity.bit() {
        return Err(QspError::LengthMismatch {
            expected: samples.len() + 1,
            actual: samples.len(),
        });
    }
    CoefficientExtractor::new(degree, parity)?.extract(samples)
}

/// Clenshaw evaluation of `Σ_j c_j T_{2j+p}(x)`.
pub fn evaluate_series(c: &ChebCoeffs, x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(clenshaw(c, x))
}

pub(crate) fn clenshaw(c: &ChebCoeffs, x: f64) -> f64 {
    let coeffs = c.coeffs();
    let parity = c.parity();
    let degree = c.degree();
    let at = |k: usize| {
        if k % 2 == parity.bit() {
            coeffs[k / 2]
        } else {
            0.0
        }
    };
    let (mut b1, mut b2) = (0.0, 0.0);
    for k in (1..=degree).rev() {
        let b0 = at(k) + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    at(0) + x * b1 - b2
}

/// Grid size used by [`infinity_norm_default`]: `max(2048, 8·degree)`.
pub fn default_norm_grid(degree: usize) -> usize {
    (8 * degree).max(2048)
}

/// `max |f(x)|` over `[-1, 1]`.
///
/// `f` is sampled on `x_k = cos(kπ/(N-1))`; every grid local maximum of `|f|`
/// within the possible grid error of the top value is then refined by a
/// golden-section search between its neighbors.
pub fn infinity_norm(c: &ChebCoeffs, grid_points: usize) -> f64 {
    // An odd point count keeps x = 0 on the grid.
    let n = grid_points.max(3) | 1;
    let step = PI / (n - 1) as f64;
    let values: Vec<f64> = (0..n)
        .map(|k| clenshaw(c, (k as f64 * step).cos()).abs())
        .collect();
    let grid_max = values.iter().cloned().fold(0.0, f64::max);
    if grid_max == 0.0 {
        return 0.0;
    }
    // Within a grid cell the phase of the highest-degree term moves by at
    // most degree·step, bounding the relative gap to the true maximum.
    let phase = (c.degree() as f64 * step).min(PI);
    let slack = grid_max * (1.0 - (0.5 * phase).cos()) * 1.5;

    let mut best = grid_max;
    for k in 0..n {
        let left = if k > 0 {
            values[k - 1]
        } else {
            f64::NEG_INFINITY
        };
        let right = if k + 1 < n {
            values[k + 1]
        } else {
            f64::NEG_INFINITY
        };
        if values[k] < left || values[k] < right || values[k] + slack < grid_max {
            continue;
        }
        let lo = if k > 0 { (k - 1) as f64 * step } else { 0.0 };
        let hi = if k + 1 < n { (k + 1) as f64 * step } else { PI };
        best = best.max(golden_max(|t| clenshaw(c, t.cos()).abs(), lo, hi));
    }
    best
}

pub fn infinity_norm_default(c: &ChebCoeffs) -> f64 {
    infinity_norm(c, default_norm_grid(c.degree()))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2).max(f(a)).max(f(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_dft(v: &[f64]) -> Vec<Complex64> {
        let n = v.len();
        (0..n)
            .map(|l| {
                v.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let ang = -2.0 * PI * ((j * l) % n) as f64 / n as f64;
                        Complex64::from_polar(x, ang)
                    })
                    .sum()
            })
            .collect()
    }

    fn t(k: usize, x: f64) -> f64 {
        (k as f64 * x.acos()).cos()
    }

    #[test]
    fn grid_shape() {
        let g = SampleGrid::new(7);
        assert_eq!(g.nodes().len(), 8);
        assert_eq!(g.nodes()[0], 1.0);
        assert!(g.nodes().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn dft_small_cases() {
        let mut delta = vec![0.0; 9];
        delta[0] = 1.0;
        for c in dft_odd_length(&delta).unwrap() {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let constant = vec![2.5; 7];
        let out = dft_odd_length(&constant).unwrap();
        assert!((out[0].re - 17.5).abs() < 1e-13);
        for c in &out[1..] {
            assert!(c.norm() < 1e-13);
        }
        assert!(dft_odd_length(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn dft_matches_naive_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [15usize, 101, 511] {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fast = dft_odd_length(&v).unwrap();
            let slow = naive_dft(&v);
            let scale = slow.iter().map(|c| c.norm()).fold(0.0, f64::max);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn extract_t2() {
        let grid = SampleGrid::new(2);
        let samples: Vec<f64> = grid.nodes().iter().map(|&x| t(2, x)).collect();
        let c = coefficients_from_samples(&samples, Parity::Even).unwrap();
        assert!(c.coeffs()[0].abs() < 1e-15);
        assert!((c.coeffs()[1] - 1.0).abs() < 1e-15);

        let zero = coefficients_from_samples(&[0.0; 5], Parity::Even).unwrap();
        assert_eq!(zero.coeffs(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn extract_rejects_bad_lengths() {
        // 4 samples means degree 3, which is odd.
        assert!(coefficients_from_samples(&[0.0; 4], Parity::Even).is_err());
        assert!(coefficients_from_samples(&[0.0; 3], Parity::Odd).is_err());
        let ex = CoefficientExtractor::new(4, Parity::Even).unwrap();
        assert!(matches!(
            ex.extract(&[0.0; 4]),
            Err(QspError::LengthMismatch {
                expected: 5,
                actual: 4
            })
        ));
    }

    #[test]
    fn series_small_cases() {
        let one_even = ChebCoeffs::new(Parity::Even, vec![1.0]).unwrap();
        let one_odd = ChebCoeffs::new(Parity::Odd, vec![1.0]).unwrap();
        let t2 = ChebCoeffs::new(Parity::Even, vec![0.0, 1.0]).unwrap();
        assert_eq!(evaluate_series(&one_even, 0.3).unwrap(), 1.0);
        assert_eq!(evaluate_series(&one_odd, 0.3).unwrap(), 0.3);
        assert!((evaluate_series(&t2, 0.5).unwrap() + 0.5).abs() < 1e-15);
        assert!(evaluate_series(&t2, 1.2).is_err());
    }

    #[test]
    fn series_matches_trig_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for parity in [Parity::Even, Parity::Odd] {
            let coeffs: Vec<f64> = (0..15).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = ChebCoeffs::new(parity, coeffs.clone()).unwrap();
            for x in [-0.93, -0.1, 0.44, 0.99] {
                let direct: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, cj)| cj * t(parity.chebyshev_index(j), x))
                    .sum();
                assert!((evaluate_series(&c, x).unwrap() - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(0), 1);
        assert_eq!(smooth_size(11), 12);
        assert_eq!(smooth_size(697), 700);
        for min in 1..300 {
            assert!(smooth_size(min) >= min);
        }
    }

    #[test]
    fn half_grid_extraction_recovers_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (parity, len) in [
            (Parity::Even, 1),
            (Parity::Odd, 1),
            (Parity::Even, 2),
            (Parity::Odd, 11),
            (Parity::Odd, 40),
            (Parity::Even, 351),
        ] {
            let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l1: f64 = raw.iter().map(|v| v.abs()).sum();
            let c = ChebCoeffs::new(parity, raw.iter().map(|v| v / l1).collect()).unwrap();
            let ex = HalfGridExtractor::new(c.degree(), parity).unwrap();
            assert!(ex.grid_size() >= len);
            let nodes = ex.nodes();
            assert!(nodes.iter().all(|&x| x > 0.0 && x < 1.0));
            let samples: Vec<f64> = nodes.iter().map(|&x| clenshaw(&c, x)).collect();
            let back = ex.extract(&samples).unwrap();
            assert!(max_abs(&back, c.coeffs()) <= 1e-14, "{parity} {len}");

            let mut first = samples.clone();
            let mut second: Vec<f64> = nodes.iter().map(|&x| -3.0 * clenshaw(&c, x)).collect();
            ex.extract_pair_in_place(&mut first, &mut second, &mut ex.scratch())
                .unwrap();
            let tripled: Vec<f64> = c.coeffs().iter().map(|v| -3.0 * v).collect();
            assert!(max_abs(&first[..len], c.coeffs()) <= 1e-14);
            assert!(max_abs(&second[..len], &tripled) <= 3e-14);
        }
        let ex = HalfGridExtractor::new(4, Parity::Even).unwrap();
        assert!(ex.extract(&[1.0]).is_err());
        assert!(HalfGridExtractor::new(4, Parity::Odd).is_err());
    }

    fn max_abs(a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn round_trip_error_scales_with_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let coeffs: Vec<f64> = (0..500).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c = ChebCoeffs::new(Parity::Even, coeffs).unwrap();
        let grid = SampleGrid::new(c.degree());
        let samples: Vec<f64> = grid.nodes().iter().map(|&x| clenshaw(&c, x)).collect();
        let back = coefficients_from_samples(&samples, Parity::Even).unwrap();
        let err = back
            .coeffs()
            .iter()
            .zip(c.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-13 * c.l1_norm(), "{err}");
    }

    #[test]
    fn round_trip_and_parity_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (parity, len) in [
            (Parity::Even, 500),
            (Parity::Odd, 500),
            (Parity::Even, 1),
            (Parity::Odd, 37),
        ] {
            // Scaled to a valid target (‖c‖₁ = 1, hence |f| ≤ 1). Unbounded
            // coefficients hit the conditioning floor |f'(x)|·ulp(x) of
            // sampling at rounded nodes; see `round_trip_error_scales_with_norm`.
            let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l1: f64 = raw.iter().map(|v| v.abs()).sum();
            let c = ChebCoeffs::new(parity, raw.iter().map(|v| v / l1).collect()).unwrap();
            let grid = SampleGrid::new(c.degree());
            let samples: Vec<f64> = grid.nodes().iter().map(|&x| clenshaw(&c, x)).collect();
            let back = coefficients_from_samples(&samples, parity).unwrap();
            let err = back
                .coeffs()
                .iter()
                .zip(c.coeffs())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-13, "{parity} {len}: {err}");
        }

        // Odd samples read as even on a grid of even degree.
        let odd = ChebCoeffs::new(Parity::Odd, vec![0.3, -0.2, 0.1]).unwrap(); // degree 5
        let grid = SampleGrid::new(6);
        let samples: Vec<f64> = grid.nodes().iter().map(|&x| clenshaw(&odd, x)).collect();
        let even = coefficients_from_samples(&samples, Parity::Even).unwrap();
        assert!(even.coeffs().iter().all(|v| v.abs() <= 1e-13));
    }

    #[test]
    fn pair_extraction_matches_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ex = CoefficientExtractor::new(21, Parity::Odd).unwrap();
        let a: Vec<f64> = (0..22).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..22).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (pa, pb) = ex.extract_pair(&a, &b).unwrap();
        let sa = ex.extract(&a).unwrap();
        let sb = ex.extract(&b).unwrap();
        for (x, y) in pa.iter().zip(sa.coeffs()).chain(pb.iter().zip(sb.coeffs())) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn norm_small_cases() {
        let one = ChebCoeffs::new(Parity::Even, vec![1.0]).unwrap();
        let t2 = ChebCoeffs::new(Parity::Even, vec![0.0, 1.0]).unwrap();
        assert_eq!(infinity_norm_default(&one), 1.0);
        assert!((infinity_norm_default(&t2) - 1.0).abs() < 1e-15);
        let zero = ChebCoeffs::zeros(Parity::Odd, 3).unwrap();
        assert_eq!(infinity_norm_default(&zero), 0.0);
    }

    #[test]
    fn norm_refines_off_grid_maximum() {
        // 0.3·T_1 + 0.5·T_3 peaks strictly inside a cell of a coarse grid.
        let c = ChebCoeffs::new(Parity::Odd, vec![0.3, 0.5]).unwrap();
        let dense = (0..200_001)
            .map(|k| clenshaw(&c, -1.0 + 2.0 * k as f64 / 200_000.0).abs())
            .fold(0.0, f64::max);
        let coarse = infinity_norm(&c, 8);
        assert!((coarse - dense).abs() < 1e-9, "{coarse} vs {dense}");
    }

    #[test]
    fn extraction_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a: Vec<f64> = (0..41).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..41).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let combo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let ca = coefficients_from_samples(&a, Parity::Even).unwrap();
        let cb = coefficients_from_samples(&b, Parity::Even).unwrap();
        let cc = coefficients_from_samples(&combo, Parity::Even).unwrap();
        for k in 0..cc.len() {
            let lin = 2.0 * ca.coeffs()[k] - 0.5 * cb.coeffs()[k];
            assert!((cc.coeffs()[k] - lin).abs() < 1e-14);
        }
    }
}

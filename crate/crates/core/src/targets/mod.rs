//! Target polynomials: truncated Jacobi-Anger series for `cos(τx)` and
//! `sin(τx)`, a Gaussian filter interpolated on the sample grid, and
//! coefficient files produced elsewhere.

mod bessel;
mod io;

use std::f64::consts::E;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use bessel::bessel_j_sequence;
pub use io::{
    coeffs_to_json, format_f64, load_coeffs, load_phases, phases_to_json, save_coeffs, save_phases,
    to_json_precise, LoadedCoeffs,
};

use crate::chebyshev::{coefficients_from_samples, infinity_norm_default, SampleGrid};
use crate::error::{QspError, Result};
use crate::types::{ChebCoeffs, Parity};

/// Default truncation error for trigonometric targets.
pub const DEFAULT_TRUNC_EPS: f64 = 1e-14;

/// Smallest degree of the given parity that is at least `e|τ|/2 + ln(1/ε₀)`.
pub fn jacobi_anger_degree(tau: f64, eps0: f64, parity: Parity) -> usize {
    let bound = E * tau.abs() / 2.0 + (1.0 / eps0).ln();
    let d = bound.ceil().max(0.0) as usize;
    if d % 2 == parity.bit() {
        d
    } else {
        d + 1
    }
}

fn check_eps(eps0: f64) -> Result<()> {
    if !(eps0 > 0.0 && eps0 < 1.0) {
        return Err(QspError::InvalidInput(format!(
            "truncation error {eps0} not in (0, 1)"
        )));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(QspError::InvalidInput(format!(
            "tau must be finite and >= 0, got {tau}"
        )));
    }
    Ok(())
}

fn trim_trailing_zeros(mut coeffs: Vec<f64>) -> Vec<f64> {
    while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
    coeffs
}

/// Truncated Chebyshev series of `cos(τx)`: `c_0 = J_0(τ)`,
/// `c_j = 2(-1)^j J_{2j}(τ)`.
pub fn jacobi_anger_cos_unscaled(tau: f64, eps0: f64) -> Result<ChebCoeffs> {
    check_tau(tau)?;
    check_eps(eps0)?;
    let degree = jacobi_anger_degree(tau, eps0, Parity::Even);
    let j = bessel_j_sequence(degree, tau);
    let coeffs = (0..=degree / 2)
        .map(|k| match k {
            0 => j[0],
            _ => 2.0 * sign(k) * j[2 * k],
        })
        .collect();
    ChebCoeffs::new(Parity::Even, trim_trailing_zeros(coeffs))
}

/// Truncated Chebyshev series of `sin(τx)`: `c_j = 2(-1)^j J_{2j+1}(τ)`.
pub fn jacobi_anger_sin_unscaled(tau: f64, eps0: f64) -> Result<ChebCoeffs> {
    check_tau(tau)?;
    check_eps(eps0)?;
    let degree = jacobi_anger_degree(tau, eps0, Parity::Odd);
    let j = bessel_j_sequence(degree, tau);
    let coeffs = (0..=degree / 2)
        .map(|k| 2.0 * sign(k) * j[2 * k + 1])
        .collect();
    ChebCoeffs::new(Parity::Odd, trim_trailing_zeros(coeffs))
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn jacobi_anger_cos(tau: f64, eps0: f64, alpha: f64) -> Result<ChebCoeffs> {
    rescale_to_norm(&jacobi_anger_cos_unscaled(tau, eps0)?, alpha)
}

pub fn jacobi_anger_sin(tau: f64, eps0: f64, alpha: f64) -> Result<ChebCoeffs> {
    rescale_to_norm(&jacobi_anger_sin_unscaled(tau, eps0)?, alpha)
}

/// `f(x) = exp(-(|x| - μ)² / σ²)`.
pub fn gaussian(mu: f64, sigma: f64, x: f64) -> f64 {
    let t = (x.abs() - mu) / sigma;
    (-t * t).exp()
}

/// Even interpolant of the Gaussian filter on the degree-`degree` sample grid.
pub fn gaussian_coeffs_unscaled(mu: f64, sigma: f64, degree: usize) -> Result<ChebCoeffs> {
    if degree < 2 || !degree.is_multiple_of(2) {
        return Err(QspError::InvalidInput(format!(
            "Gaussian target needs an even degree >= 2, got {degree}"
        )));
    }
    if !(sigma > 0.0) {
        return Err(QspError::InvalidInput(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let grid = SampleGrid::new(degree);
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| gaussian(mu, sigma, x))
        .collect();
    coefficients_from_samples(&samples, Parity::Even)
}

pub fn gaussian_coeffs(mu: f64, sigma: f64, degree: usize, alpha: f64) -> Result<ChebCoeffs> {
    rescale_to_norm(&gaussian_coeffs_unscaled(mu, sigma, degree)?, alpha)
}

/// `c · α / ‖f‖_∞`.
pub fn rescale_to_norm(c: &ChebCoeffs, alpha: f64) -> Result<ChebCoeffs> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(QspError::InvalidInput(format!(
            "scale {alpha} not in (0, 1]"
        )));
    }
    let norm = infinity_norm_default(c);
    if norm == 0.0 {
        return Err(QspError::InvalidInput(
            "cannot rescale the zero polynomial".into(),
        ));
    }
    Ok(c.scaled(alpha / norm))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetKind {
    Cos { tau: f64 },
    Sin { tau: f64 },
    Gaussian { mu: f64, sigma: f64, degree: usize },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(flatten)]
    pub kind: TargetKind,
    /// Target sup norm `α`; `None` keeps the natural normalization.
    pub scale: Option<f64>,
    /// Truncation error `ε₀` for the trigonometric kinds.
    pub trunc_eps: f64,
}

impl TargetSpec {
    pub fn new(kind: TargetKind) -> Self {
        Self {
            kind,
            scale: None,
            trunc_eps: DEFAULT_TRUNC_EPS,
        }
    }

    pub fn with_scale(mut self, alpha: f64) -> Self {
        self.scale = Some(alpha);
        self
    }

    pub fn label(&self) -> String {
        match &self.kind {
            TargetKind::Cos { tau } => format!("cos({tau}x)"),
            TargetKind::Sin { tau } => format!("sin({tau}x)"),
            TargetKind::Gaussian { mu, sigma, .. } => format!("gaussian(mu={mu} sigma={sigma})"),
            TargetKind::File { path } => format!("file({})", path.display()),
        }
    }

    /// Builds the coefficient vector. For files, `exceeds_unit_norm` is
    /// reported through [`LoadedCoeffs`] by [`TargetSpec::build_checked`].
    pub fn build(&self) -> Result<ChebCoeffs> {
        Ok(self.build_checked()?.coeffs)
    }

    pub fn build_checked(&self) -> Result<LoadedCoeffs> {
        let raw = match &self.kind {
            TargetKind::Cos { tau } => jacobi_anger_cos_unscaled(*tau, self.trunc_eps)?,
            TargetKind::Sin { tau } => jacobi_anger_sin_unscaled(*tau, self.trunc_eps)?,
            TargetKind::Gaussian { mu, sigma, degree } => {
                gaussian_coeffs_unscaled(*mu, *sigma, *degree)?
            }
            TargetKind::File { path } => load_coeffs(path)?.coeffs,
        };
        let coeffs = match self.scale {
            Some(alpha) => rescale_to_norm(&raw, alpha)?,
            None => raw,
        };
        let infinity_norm = infinity_norm_default(&coeffs);
        Ok(LoadedCoeffs {
            coeffs,
            infinity_norm,
            exceeds_unit_norm: infinity_norm > 1.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{clenshaw, infinity_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degrees_follow_the_truncation_rule() {
        assert_eq!(jacobi_anger_degree(1000.0, 1e-14, Parity::Even), 1392);
        assert_eq!(jacobi_anger_degree(1000.0, 1e-14, Parity::Odd), 1393);
        let c = jacobi_anger_cos_unscaled(1000.0, 1e-14).unwrap();
        let s = jacobi_anger_sin_unscaled(1000.0, 1e-14).unwrap();
        assert!(c.degree().abs_diff(1390) <= 2);
        assert!(s.degree().abs_diff(1391) <= 2);
    }

    #[test]
    fn tau_zero() {
        let c = jacobi_anger_cos(0.0, 1e-14, 0.7).unwrap();
        assert_eq!(c.coeffs(), &[0.7]);
        assert!(jacobi_anger_sin(0.0, 1e-14, 0.7).is_err());
    }

    #[test]
    fn truncated_series_matches_trig_functions() {
        let eps0 = 1e-14;
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for tau in [10.0, 100.0] {
            let c = jacobi_anger_cos_unscaled(tau, eps0).unwrap();
            let s = jacobi_anger_sin_unscaled(tau, eps0).unwrap();
            assert_eq!(c.parity(), Parity::Even);
            assert_eq!(s.parity(), Parity::Odd);
            for _ in 0..100 {
                let x: f64 = rng.gen_range(-1.0..=1.0);
                assert!((clenshaw(&c, x) - (tau * x).cos()).abs() <= 2.0 * eps0);
                assert!((clenshaw(&s, x) - (tau * x).sin()).abs() <= 2.0 * eps0);
            }
        }
    }

    #[test]
    fn cos_norm_is_one() {
        let c = jacobi_anger_cos_unscaled(10.0, 1e-14).unwrap();
        assert!((infinity_norm_default(&c) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn rescale_cases() {
        let c = ChebCoeffs::new(Parity::Even, vec![1.0, 1.0]).unwrap(); // 1 + T_2, max 2
        let r = rescale_to_norm(&c, 1.0).unwrap();
        assert!((r.coeffs()[0] - 0.5).abs() < 1e-15);
        assert!((r.coeffs()[1] - 0.5).abs() < 1e-15);
        let once = rescale_to_norm(&c, 0.8).unwrap();
        let twice = rescale_to_norm(&once, 0.8).unwrap();
        for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
            assert!((a - b).abs() <= 1e-14);
        }
        assert!(rescale_to_norm(&ChebCoeffs::zeros(Parity::Odd, 2).unwrap(), 0.5).is_err());
        assert!(rescale_to_norm(&c, 1.5).is_err());
        assert!(rescale_to_norm(&c, 0.0).is_err());
    }

    #[test]
    fn near_coherent_rescale_self_check() {
        let alpha = 1.0 - 1e-9;
        let c = jacobi_anger_cos(1000.0, 1e-14, alpha).unwrap();
        assert!((infinity_norm_default(&c) - alpha).abs() <= 1e-12);
    }

    #[test]
    fn sin_rescale_bounds_the_true_maximum() {
        // The maxima of sin(1000x) fall between grid points; refinement
        // must still find them so the rescaled target stays below one.
        let c = jacobi_anger_sin(1000.0, 1e-14, 1.0 - 1e-9).unwrap();
        let fine = infinity_norm(&c, 64 * c.degree());
        assert!(fine <= 1.0, "{fine}");
    }

    #[test]
    fn gaussian_accuracy() {
        let (mu, sigma) = (0.5, 0.1);
        let c = gaussian_coeffs_unscaled(mu, sigma, 100).unwrap();
        assert_eq!(c.len(), 51);
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..200 {
            let x: f64 = rng.gen_range(-1.0..=1.0);
            assert!((clenshaw(&c, x) - gaussian(mu, sigma, x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn gaussian_flat_limit_and_errors() {
        let c = gaussian_coeffs(0.0, 100.0, 10, 0.9).unwrap();
        assert!((c.coeffs()[0] - 0.9).abs() < 1e-4);
        assert!(c.coeffs()[1..].iter().all(|v| v.abs() < 1e-4));
        assert!(gaussian_coeffs_unscaled(0.5, 0.1, 7).is_err());
        assert!(gaussian_coeffs_unscaled(0.5, 0.1, 0).is_err());
        assert!(gaussian_coeffs_unscaled(0.5, 0.0, 10).is_err());
    }

    #[test]
    fn gaussian_even_extension_symmetry() {
        let (mu, sigma, degree) = (0.3, 0.2, 40);
        let grid = SampleGrid::new(degree);
        let signed: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| gaussian(mu, sigma, x))
            .collect();
        let folded: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| gaussian(mu, sigma, x.abs()))
            .collect();
        let a = coefficients_from_samples(&signed, Parity::Even).unwrap();
        let b = coefficients_from_samples(&folded, Parity::Even).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spec_serializes_with_kind_tag() {
        let spec = TargetSpec::new(TargetKind::Cos { tau: 10.0 }).with_scale(0.9);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"cos\""), "{json}");
        let back: TargetSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
}

//! The coefficient map `F(Φ)`, Newton's method, and fixed-point iteration.
//!
//! Both solvers start from `Φ = 0` and stop once `‖F(Φ) - c‖₁` drops below
//! the configured tolerance. The fixed-point iteration is Newton's method
//! with the Jacobian frozen at its value at the origin, `DF(0) = 2I`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{CoefficientExtractor, SampleGrid};
use crate::error::{QspError, Result};
use crate::eval::{So3Kernel, Su2Kernel, XRotation};
use crate::jacobian::{jacobian_fd, jacobian_mps_real, DEFAULT_FD_STEP};
use crate::linalg::{condition_estimate, LuFactorization};
use crate::types::{ChebCoeffs, FullPhases, Parity, ReducedPhases};

/// Which arithmetic evaluates `g` on the sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalKernel {
    #[default]
    Real,
    Complex,
}

/// `F(Φ)`, the Chebyshev coefficients of `g(·, Φ)`, using the SO(3) kernel.
pub fn evaluate_f(phi: &ReducedPhases) -> ChebCoeffs {
    evaluate_f_with(phi, EvalKernel::Real)
}

pub fn evaluate_f_with(phi: &ReducedPhases, kernel: EvalKernel) -> ChebCoeffs {
    let grid = SampleGrid::new(phi.degree());
    let samples: Vec<f64> = match kernel {
        EvalKernel::Real => {
            let k = So3Kernel::new(phi);
            grid.nodes()
                .par_iter()
                .map(|&x| k.g_unchecked(&XRotation::new(x)))
                .collect()
        }
        EvalKernel::Complex => {
            let k = Su2Kernel::new(&phi.to_full());
            grid.nodes()
                .par_iter()
                .map(|&x| k.g(x).expect("grid nodes lie in [-1, 1]"))
                .collect()
        }
    };
    CoefficientExtractor::new(phi.degree(), phi.parity())
        .and_then(|ex| ex.extract(&samples))
        .expect("grid size matches the phase parity")
}

/// Coefficients of `g(·, Ψ)` for any full sequence, symmetric or not.
pub fn evaluate_f_full(psi: &FullPhases) -> Result<ChebCoeffs> {
    let degree = psi.degree();
    let grid = SampleGrid::new(degree);
    let k = Su2Kernel::new(psi);
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| k.g(x))
        .collect::<Result<_>>()?;
    CoefficientExtractor::new(degree, Parity::of_degree(degree))?.extract(&samples)
}

/// `‖F(Φ) - c‖₁`.
pub fn residual_l1(phi: &ReducedPhases, c: &ChebCoeffs) -> Result<f64> {
    c.check_compatible(phi.parity(), phi.len())?;
    Ok(l1_distance(&evaluate_f(phi), c))
}

fn l1_distance(a: &ChebCoeffs, b: &ChebCoeffs) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).abs())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Newton,
    Fpi,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Newton => f.write_str("newton"),
            Method::Fpi => f.write_str("fpi"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = QspError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton" => Ok(Method::Newton),
            "fpi" => Ok(Method::Fpi),
            other => Err(QspError::InvalidInput(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub method: Method,
    /// Stop once `‖F(Φ) - c‖₁` falls below this.
    pub residual_tol: f64,
    pub max_iter: usize,
    pub record_history: bool,
    /// Compare the first MPS Jacobian against finite differences (Newton only).
    #[serde(default)]
    pub fd_check: Option<bool>,
    /// Estimate `κ₂(DF)` at the returned iterate.
    #[serde(default)]
    pub estimate_condition: bool,
    /// Seed for the condition estimate's start vector.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Replaces the zero initial guess when set.
    #[serde(default)]
    pub initial_guess: Option<Vec<f64>>,
}

fn default_seed() -> u64 {
    7
}

/// Iterations used by the condition estimate inside the solvers.
pub const CONDITION_ITERATIONS: usize = 100;

impl SolverConfig {
    pub fn newton() -> Self {
        Self {
            method: Method::Newton,
            residual_tol: 1e-12,
            max_iter: 100,
            record_history: true,
            fd_check: None,
            estimate_condition: false,
            seed: default_seed(),
            initial_guess: None,
        }
    }

    pub fn fpi() -> Self {
        Self {
            method: Method::Fpi,
            max_iter: 100_000,
            ..Self::newton()
        }
    }

    pub fn for_method(method: Method) -> Self {
        match method {
            Method::Newton => Self::newton(),
            Method::Fpi => Self::fpi(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(QspError::InvalidInput(
                "residual_tol must be positive".into(),
            ));
        }
        if self.max_iter == 0 {
            return Err(QspError::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub converged: bool,
    /// Number of updates applied to the initial guess.
    pub iterations: usize,
    /// `‖F(Φ^t) - c‖₁` for `t = 0..=iterations` when recording.
    pub residual_history: Vec<f64>,
    /// Milliseconds since the start of the solve, aligned with the history.
    pub elapsed_ms_history: Vec<f64>,
    pub final_residual: f64,
    pub wall_time: f64,
    pub condition_estimate: Option<f64>,
    /// Relative Frobenius gap between the MPS and finite-difference Jacobians
    /// at the initial guess, when requested.
    pub fd_check_error: Option<f64>,
}

impl SolverReport {
    fn new() -> Self {
        Self {
            converged: false,
            iterations: 0,
            residual_history: Vec::new(),
            elapsed_ms_history: Vec::new(),
            final_residual: f64::NAN,
            wall_time: 0.0,
            condition_estimate: None,
            fd_check_error: None,
        }
    }
}

/// Dispatches on `cfg.method`.
pub fn solve(c: &ChebCoeffs, cfg: &SolverConfig) -> Result<(ReducedPhases, SolverReport)> {
    match cfg.method {
        Method::Newton => newton_solve(c, cfg),
        Method::Fpi => fpi_solve(c, cfg),
    }
}

fn initial_guess(c: &ChebCoeffs, cfg: &SolverConfig) -> Result<ReducedPhases> {
    match &cfg.initial_guess {
        Some(v) => {
            if v.len() != c.len() {
                return Err(QspError::LengthMismatch {
                    expected: c.len(),
                    actual: v.len(),
                });
            }
            ReducedPhases::new(c.parity(), v.clone())
        }
        None => ReducedPhases::zeros(c.parity(), c.len()),
    }
}

/// Shared driver: `step` maps `(Φ, F(Φ) - c)` to the next iterate.
fn iterate<S>(
    c: &ChebCoeffs,
    cfg: &SolverConfig,
    mut step: S,
) -> Result<(ReducedPhases, SolverReport)>
where
    S: FnMut(&ReducedPhases, &[f64], &mut SolverReport) -> Result<ReducedPhases>,
{
    cfg.validate()?;
    let start = Instant::now();
    let mut phi = initial_guess(c, cfg)?;
    let mut report = SolverReport::new();

    loop {
        let f = evaluate_f(&phi);
        let diff: Vec<f64> = f
            .coeffs()
            .iter()
            .zip(c.coeffs())
            .map(|(a, b)| a - b)
            .collect();
        let residual: f64 = diff.iter().map(|v| v.abs()).sum();
        report.final_residual = residual;
        if cfg.record_history {
            report.residual_history.push(residual);
            report
                .elapsed_ms_history
                .push(start.elapsed().as_secs_f64() * 1e3);
        }
        if residual < cfg.residual_tol {
            report.converged = true;
            break;
        }
        if report.iterations >= cfg.max_iter || !residual.is_finite() {
            break;
        }
        phi = match step(&phi, &diff, &mut report) {
            Ok(next) => next,
            Err(QspError::SingularMatrix { .. }) => {
                report.wall_time = start.elapsed().as_secs_f64();
                return Err(QspError::NewtonBreakdown {
                    report: Box::new(report),
                });
            }
            Err(e) => return Err(e),
        };
        report.iterations += 1;
    }

    if cfg.estimate_condition {
        let jac = jacobian_mps_real(&phi)?;
        report.condition_estimate = Some(condition_estimate(&jac, CONDITION_ITERATIONS, cfg.seed));
    }
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((phi, report))
}

/// `Φ ← Φ - DF(Φ)⁻¹ (F(Φ) - c)` from `Φ = 0`.
pub fn newton_solve(c: &ChebCoeffs, cfg: &SolverConfig) -> Result<(ReducedPhases, SolverReport)> {
    let fd_check = cfg.fd_check.unwrap_or(false);
    iterate(c, cfg, |phi, diff, report| {
        let jac = jacobian_mps_real(phi)?;
        if fd_check && report.fd_check_error.is_none() {
            let fd = jacobian_fd(phi, DEFAULT_FD_STEP)?;
            report.fd_check_error = Some(jac.relative_frobenius_error(&fd));
        }
        let delta = LuFactorization::new(&jac)?.solve(diff)?;
        let next: Vec<f64> = phi
            .phases()
            .iter()
            .zip(&delta)
            .map(|(p, d)| p - d)
            .collect();
        ReducedPhases::new(phi.parity(), next)
    })
}

/// `Φ ← Φ - ½ (F(Φ) - c)` from `Φ = 0`.
pub fn fpi_solve(c: &ChebCoeffs, cfg: &SolverConfig) -> Result<(ReducedPhases, SolverReport)> {
    iterate(c, cfg, |phi, diff, _| {
        let next: Vec<f64> = phi
            .phases()
            .iter()
            .zip(diff)
            .map(|(p, d)| p - 0.5 * d)
            .collect();
        ReducedPhases::new(phi.parity(), next)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::evaluate_series;
    use crate::eval::evaluate_g_real;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f_small_cases() {
        for parity in [Parity::Even, Parity::Odd] {
            let zero = ReducedPhases::zeros(parity, 6).unwrap();
            assert!(evaluate_f(&zero).coeffs().iter().all(|&v| v == 0.0));
        }
        let phi = ReducedPhases::new(Parity::Even, vec![0.3]).unwrap();
        let f = evaluate_f(&phi);
        assert!((f.coeffs()[0] - 0.6f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn f_series_reproduces_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for parity in [Parity::Even, Parity::Odd] {
            let v = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let phi = ReducedPhases::new(parity, v).unwrap();
            let f = evaluate_f(&phi);
            for _ in 0..200 {
                let x = rng.gen_range(-1.0..=1.0);
                let diff =
                    (evaluate_series(&f, x).unwrap() - evaluate_g_real(x, &phi).unwrap()).abs();
                assert!(diff <= 1e-12, "{diff}");
            }
        }
    }

    #[test]
    fn kernels_agree_on_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let v = (0..25).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi = ReducedPhases::new(Parity::Odd, v).unwrap();
        let a = evaluate_f_with(&phi, EvalKernel::Real);
        let b = evaluate_f_with(&phi, EvalKernel::Complex);
        let c = evaluate_f_full(&phi.to_full()).unwrap();
        assert!(l1_distance(&a, &b) < 1e-12);
        assert!(l1_distance(&a, &c) < 1e-12);
    }

    #[test]
    fn residual_cases() {
        let zero = ReducedPhases::zeros(Parity::Even, 2).unwrap();
        let c0 = ChebCoeffs::zeros(Parity::Even, 2).unwrap();
        assert_eq!(residual_l1(&zero, &c0).unwrap(), 0.0);
        let c = ChebCoeffs::new(Parity::Even, vec![0.3, -0.2]).unwrap();
        assert!((residual_l1(&zero, &c).unwrap() - 0.5).abs() < 1e-15);
        let wrong = ChebCoeffs::new(Parity::Odd, vec![0.3, -0.2]).unwrap();
        assert!(matches!(
            residual_l1(&zero, &wrong),
            Err(QspError::ParityMismatch)
        ));
        let short = ChebCoeffs::new(Parity::Even, vec![0.3]).unwrap();
        assert!(matches!(
            residual_l1(&zero, &short),
            Err(QspError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_target_converges_immediately() {
        let c = ChebCoeffs::zeros(Parity::Odd, 5).unwrap();
        for cfg in [SolverConfig::newton(), SolverConfig::fpi()] {
            let (phi, report) = solve(&c, &cfg).unwrap();
            assert!(report.converged);
            assert_eq!(report.iterations, 0);
            assert_eq!(report.residual_history, vec![0.0]);
            assert!(phi.phases().iter().all(|&p| p == 0.0));
        }
    }

    #[test]
    fn newton_and_fpi_agree_on_small_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut coeffs: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l1: f64 = coeffs.iter().map(|v: &f64| v.abs()).sum();
        coeffs.iter_mut().for_each(|v| *v *= 0.5 / l1);
        let c = ChebCoeffs::new(Parity::Even, coeffs).unwrap();
        let (pn, rn) = newton_solve(&c, &SolverConfig::newton()).unwrap();
        let (pf, rf) = fpi_solve(&c, &SolverConfig::fpi()).unwrap();
        assert!(rn.converged && rf.converged);
        for (a, b) in pn.phases().iter().zip(pf.phases()) {
            assert!((a - b).abs() <= 1e-10);
        }
        assert!(rn.iterations < rf.iterations);
        let last = *rn.residual_history.last().unwrap();
        assert!(last < 1e-12);
    }

    #[test]
    fn fd_check_and_condition_are_reported() {
        let c = ChebCoeffs::new(Parity::Odd, vec![0.3, 0.1, -0.05]).unwrap();
        let cfg = SolverConfig {
            fd_check: Some(true),
            estimate_condition: true,
            ..SolverConfig::newton()
        };
        let (_, report) = newton_solve(&c, &cfg).unwrap();
        assert!(report.fd_check_error.unwrap() < 1e-6);
        assert!(report.condition_estimate.unwrap() >= 1.0);
    }

    #[test]
    fn non_convergence_is_a_report() {
        let c = ChebCoeffs::new(Parity::Even, vec![0.2, 0.5, -0.25]).unwrap();
        let cfg = SolverConfig::fpi().with_max_iter(2);
        let (_, report) = fpi_solve(&c, &cfg).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 2);
        assert_eq!(report.residual_history.len(), 3);
        assert!(*report.residual_history.last().unwrap() >= cfg.residual_tol);
    }

    #[test]
    fn singular_step_becomes_breakdown_with_report() {
        let c = ChebCoeffs::new(Parity::Even, vec![0.4]).unwrap();
        let err = iterate(&c, &SolverConfig::newton(), |_, _, _| {
            Err(QspError::SingularMatrix {
                column: 0,
                pivot: 0.0,
            })
        })
        .unwrap_err();
        match err {
            QspError::NewtonBreakdown { report } => {
                assert!(!report.converged);
                assert_eq!(report.iterations, 0);
                assert_eq!(report.residual_history.len(), 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_config_rejected() {
        let c = ChebCoeffs::zeros(Parity::Even, 2).unwrap();
        assert!(solve(&c, &SolverConfig::newton().with_tol(0.0)).is_err());
        assert!(solve(&c, &SolverConfig::newton().with_max_iter(0)).is_err());
        let cfg = SolverConfig {
            initial_guess: Some(vec![0.0; 3]),
            ..SolverConfig::newton()
        };
        assert!(solve(&c, &cfg).is_err());
    }
}

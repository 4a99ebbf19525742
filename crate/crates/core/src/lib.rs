//! Phase factors for symmetric quantum signal processing.
//!
//! Given the Chebyshev coefficients `c` of a real target polynomial of
//! definite parity with `‖f‖_∞ ≤ 1`, find reduced phase factors `Φ` such that
//! `g(x, Φ) = Im ⟨0|U(x, Φ)|0⟩` reproduces the polynomial, i.e. solve
//! `F(Φ) = c`. Newton's method from `Φ = 0` converges in a handful of
//! iterations even when `‖f‖_∞` is within `1e-9` of one.
//!
//! ```no_run
//! use qsp_core::{newton_solve, targets, SolverConfig};
//!
//! let c = targets::jacobi_anger_cos(100.0, 1e-14, 0.9).unwrap();
//! let (phases, report) = newton_solve(&c, &SolverConfig::newton()).unwrap();
//! assert!(report.converged);
//! println!("{} phases, {} iterations", phases.len(), report.iterations);
//! ```

pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod eval;
pub mod jacobian;
pub mod linalg;
pub mod solvers;
pub mod targets;
pub mod types;

pub use chebyshev::{coefficients_from_samples, evaluate_series, infinity_norm, SampleGrid};
pub use error::{QspError, Result};
pub use eval::{evaluate_g_complex, evaluate_g_real, evaluate_u};
pub use jacobian::{jacobian_fd, jacobian_mps_complex, jacobian_mps_real, JacobianMatrix};
pub use linalg::{condition_estimate, lu_solve, Matrix};
pub use solvers::{
    evaluate_f, fpi_solve, newton_solve, residual_l1, solve, Method, SolverConfig, SolverReport,
};
pub use types::{ChebCoeffs, FullPhases, Parity, ReducedPhases};

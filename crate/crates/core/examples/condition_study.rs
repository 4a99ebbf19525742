//! Growth of the Jacobian condition number at the solution as the target
//! norm approaches one.
//!
//! ```text
//! cargo run --release --example condition_study
//! ```

use qsp_core::solvers::CONDITION_ITERATIONS;
use qsp_core::targets::{jacobi_anger_cos, DEFAULT_TRUNC_EPS};
use qsp_core::{condition_estimate, jacobian_mps_real, newton_solve, Result, SolverConfig};

fn main() -> Result<()> {
    println!("{:>12} {:>6} {:>12}", "scale", "iters", "cond(DF)");
    for alpha in [0.5, 0.9, 0.99, 0.999, 0.9999] {
        let c = jacobi_anger_cos(100.0, DEFAULT_TRUNC_EPS, alpha)?;
        let (phi, r) = newton_solve(&c, &SolverConfig::newton())?;
        let kappa = condition_estimate(&jacobian_mps_real(&phi)?, CONDITION_ITERATIONS, 7);
        println!("{alpha:>12} {:>6} {kappa:>12.3}", r.iterations);
    }
    Ok(())
}

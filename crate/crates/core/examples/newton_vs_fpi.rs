//! Newton against fixed-point iteration as the target approaches the
//! fully-coherent regime `‖f‖∞ → 1`.
//!
//! ```text
//! cargo run --release --example newton_vs_fpi
//! ```

use qsp_core::targets::{jacobi_anger_cos, DEFAULT_TRUNC_EPS};
use qsp_core::{solve, Method, Result, SolverConfig};

fn main() -> Result<()> {
    let tau = 100.0;
    println!(
        "{:>8} {:>8} {:>6} {:>10} {:>10}",
        "scale", "method", "iters", "residual", "converged"
    );
    for alpha in [0.5, 0.9, 0.99, 0.999] {
        let c = jacobi_anger_cos(tau, DEFAULT_TRUNC_EPS, alpha)?;
        for method in [Method::Newton, Method::Fpi] {
            let cfg = SolverConfig::for_method(method).with_max_iter(200);
            let (_, r) = solve(&c, &cfg)?;
            println!(
                "{alpha:>8} {:>8} {:>6} {:>10.2e} {:>10}",
                format!("{method:?}").to_lowercase(),
                r.iterations,
                r.final_residual,
                r.converged
            );
        }
    }
    Ok(())
}

//! Phase factors for Hamiltonian simulation: solve for `0.9·cos(τx)` and
//! `0.9·sin(τx)` with Newton's method and report the convergence history.
//!
//! ```text
//! cargo run --release --example solve_hamiltonian -- 1000
//! ```

use qsp_core::targets::{jacobi_anger_cos, jacobi_anger_sin, DEFAULT_TRUNC_EPS};
use qsp_core::{newton_solve, Result, SolverConfig};

fn main() -> Result<()> {
    let tau: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1000.0);
    let alpha = 0.9;

    for (name, c) in [
        ("cos", jacobi_anger_cos(tau, DEFAULT_TRUNC_EPS, alpha)?),
        ("sin", jacobi_anger_sin(tau, DEFAULT_TRUNC_EPS, alpha)?),
    ] {
        let (phi, report) = newton_solve(&c, &SolverConfig::newton())?;
        println!(
            "{alpha}·{name}({tau}x): degree {}, {} phases",
            c.degree(),
            phi.len()
        );
        for (k, r) in report.residual_history.iter().enumerate() {
            println!("  iter {k:>2}  residual {r:.3e}");
        }
        println!(
            "  converged={} in {:.1} ms, first phases {:?}",
            report.converged,
            report.wall_time * 1e3,
            &phi.phases()[..3.min(phi.len())]
        );
    }
    Ok(())
}

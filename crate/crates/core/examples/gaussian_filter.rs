//! Phase factors for an even Gaussian bump `exp(-((|x|-μ)/σ)²)` used as a
//! spectral filter, checked pointwise after the solve.
//!
//! ```text
//! cargo run --release --example gaussian_filter -- 0.5 0.05 200
//! ```

use qsp_core::targets::gaussian_coeffs;
use qsp_core::{evaluate_g_real, evaluate_series, newton_solve, Result, SolverConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let sigma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let degree: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);

    let c = gaussian_coeffs(mu, sigma, degree, 0.99)?;
    let (phi, report) = newton_solve(&c, &SolverConfig::newton())?;
    println!(
        "gaussian(mu={mu} sigma={sigma}) degree {degree}: {} iterations, residual {:.2e}",
        report.iterations, report.final_residual
    );

    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let x = -1.0 + 0.1 * k as f64;
        let g = evaluate_g_real(x, &phi)?;
        let f = evaluate_series(&c, x)?;
        worst = worst.max((g - f).abs());
        println!(
            "  x = {x:+.1}  g = {g:+.6}  bar = {}",
            "#".repeat((40.0 * g.abs()) as usize)
        );
    }
    println!("max |g - f| on the printed grid: {worst:.2e}");
    Ok(())
}

//! The real SO(3) kernel and the SU(2) product evaluate the same polynomial;
//! compare values and cost at a few random points.
//!
//! ```text
//! cargo run --release --example real_vs_complex
//! ```

use std::time::Instant;

use qsp_core::{evaluate_g_complex, evaluate_g_real, evaluate_u, Parity, ReducedPhases, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = ReducedPhases::new(
        Parity::Even,
        (0..1000).map(|_| rng.gen_range(-3.0..3.0)).collect(),
    )?;
    let xs: Vec<f64> = (0..2000).map(|_| rng.gen_range(-1.0..=1.0)).collect();

    let t = Instant::now();
    let real: Vec<f64> = xs
        .iter()
        .map(|&x| evaluate_g_real(x, &phi))
        .collect::<Result<_>>()?;
    let t_real = t.elapsed();
    let t = Instant::now();
    let complex: Vec<f64> = xs
        .iter()
        .map(|&x| evaluate_g_complex(x, &phi))
        .collect::<Result<_>>()?;
    let t_complex = t.elapsed();

    let gap = real
        .iter()
        .zip(&complex)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("degree {} at {} points", phi.degree(), xs.len());
    println!("max |g_real - g_complex| = {gap:.2e}");
    println!("real {t_real:.2?}, complex {t_complex:.2?}");

    let u = evaluate_u(0.3, &phi.to_full())?;
    println!(
        "U(0.3): det = {:.15}, Re U₀₀ = {:.6}",
        u.det(),
        u.entry(0, 0).re
    );
    Ok(())
}

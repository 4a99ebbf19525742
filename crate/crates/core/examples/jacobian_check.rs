//! The structured Jacobian against central finite differences, with the
//! time each takes.
//!
//! ```text
//! cargo run --release --example jacobian_check -- 200
//! ```

use std::time::Instant;

use qsp_core::jacobian::DEFAULT_FD_STEP;
use qsp_core::{
    jacobian_fd, jacobian_mps_complex, jacobian_mps_real, Parity, ReducedPhases, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let len: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = ReducedPhases::new(
        Parity::Odd,
        (0..len).map(|_| rng.gen_range(-0.5..0.5)).collect(),
    )?;

    let t = Instant::now();
    let real = jacobian_mps_real(&phi)?;
    let t_real = t.elapsed();
    let t = Instant::now();
    let complex = jacobian_mps_complex(&phi)?;
    let t_complex = t.elapsed();
    let t = Instant::now();
    let fd = jacobian_fd(&phi, DEFAULT_FD_STEP)?;
    let t_fd = t.elapsed();

    println!("d̃ = {len} (degree {})", phi.degree());
    println!("real sweep     {t_real:>10.2?}");
    println!(
        "complex sweep  {t_complex:>10.2?}  max |real - complex| = {:.2e}",
        real.max_abs_diff(&complex)
    );
    println!(
        "finite diff    {t_fd:>10.2?}  relative Frobenius error = {:.2e}",
        real.relative_frobenius_error(&fd)
    );
    Ok(())
}

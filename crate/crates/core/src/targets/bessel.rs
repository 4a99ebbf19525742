//! Bessel functions of the first kind, `J_0(τ) … J_K(τ)`, by Miller's
//! downward recurrence normalized with `J_0 + 2 Σ_{k≥1} J_{2k} = 1`.

const RESCALE_ABOVE: f64 = 1e250;

/// Index the downward recurrence starts from. The trial sequence has to
/// begin well past both the requested order and the argument, where `J_k`
/// is negligible.
fn start_index(k_max: usize, tau: f64) -> usize {
    let top = k_max.max(tau.ceil() as usize).max(1);
    let m = top + 20 + (160.0 * top as f64).sqrt().ceil() as usize;
    m + m % 2
}

/// `[J_0(τ), …, J_{k_max}(τ)]` for `τ ≥ 0`.
pub fn bessel_j_sequence(k_max: usize, tau: f64) -> Vec<f64> {
    assert!(
        tau >= 0.0 && tau.is_finite(),
        "Bessel argument must be finite and non-negative"
    );
    let mut out = vec![0.0; k_max + 1];
    if tau == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let m = start_index(k_max, tau);
    let mut j = vec![0.0; m + 2];
    j[m] = 1.0;
    for k in (1..=m).rev() {
        j[k - 1] = (2.0 * k as f64 / tau) * j[k] - j[k + 1];
        if j[k - 1].abs() > RESCALE_ABOVE {
            for v in &mut j[k - 1..] {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let norm = j[0] + 2.0 * j[2..=m].iter().step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&j) {
        *o = v / norm;
    }
    out
}

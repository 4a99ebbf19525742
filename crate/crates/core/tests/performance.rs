//! Cost-model smoke tests. Timings are minima over repeats so that a
//! single scheduler hiccup cannot fail them, and serialized so that
//! concurrently running tests do not share the measured cores.

use std::f64::consts::PI;
use std::hint::black_box;
use std::sync::Mutex;
use std::time::Instant;

use qsp_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_phi(seed: u64, parity: Parity, len: usize) -> ReducedPhases {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ReducedPhases::new(parity, (0..len).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap()
}

static TIMING: Mutex<()> = Mutex::new(());

fn min_time<F: FnMut()>(repeats: usize, mut f: F) -> f64 {
    (0..repeats)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn jacobian_costs_a_few_function_evaluations() {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    let phi = random_phi(31, Parity::Even, 700);
    let f = min_time(7, || {
        black_box(evaluate_f(&phi));
    });
    let j = min_time(5, || {
        black_box(jacobian_mps_real(&phi).unwrap());
    });
    println!("jacobian {:.1}ms, evaluate_F {:.1}ms, ratio {:.2}", j * 1e3, f * 1e3, j / f);
    assert!(
        j <= 5.0 * f,
        "jacobian {:.1}ms vs evaluate_F {:.1}ms",
        j * 1e3,
        f * 1e3
    );
}

#[test]
fn jacobian_cost_scales_quadratically() {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    // Degree d ↦ 2d: O(d² log d) predicts a factor just above 4. Each round
    // times every size back to back and yields one ratio per doubling, so
    // both sides of a ratio see the same machine state; the median over
    // rounds discards rounds hit by a slow spell on a shared core.
    let degrees = [200, 400, 800, 1600];
    let phis: Vec<ReducedPhases> = degrees
        .iter()
        .map(|&d| random_phi(d as u64, Parity::Even, d / 2 + 1))
        .collect();
    let rounds = 21;
    let mut ratios = vec![Vec::with_capacity(rounds); degrees.len() - 1];
    for _ in 0..rounds {
        let times: Vec<f64> = phis
            .iter()
            .map(|phi| {
                min_time(3, || {
                    black_box(jacobian_mps_real(phi).unwrap());
                })
            })
            .collect();
        for (r, w) in ratios.iter_mut().zip(times.windows(2)) {
            r.push(w[1] / w[0]);
        }
    }
    for (r, d) in ratios.iter_mut().zip(degrees) {
        r.sort_by(f64::total_cmp);
        let median = r[r.len() / 2];
        println!("degree {d} -> {}: median ratio {median:.2}", 2 * d);
        assert!(
            median <= 4.5,
            "degree {d} -> {}: median ratio {median:.2} ({r:.2?})",
            2 * d
        );
    }
}

#[test]
fn lu_on_large_system_is_fast() {
    let _guard = TIMING.lock().unwrap_or_else(|e| e.into_inner());
    let n = 1400;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a = Matrix::from_rows(n, n, data).unwrap();
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t = Instant::now();
    let x = lu_solve(&a, &b).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let r = a.mul_vec(&x);
    let res = r
        .iter()
        .zip(&b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(res < 1e-9, "{res:e}");
    assert!(secs < 2.0, "{secs:.2}s");
}

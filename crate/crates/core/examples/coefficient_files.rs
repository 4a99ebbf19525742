//! Round trip through the on-disk formats: write a target's coefficients,
//! solve from the file, save the phases and reload them.
//!
//! ```text
//! cargo run --release --example coefficient_files
//! ```

use qsp_core::targets::{
    load_coeffs, load_phases, save_coeffs, save_phases, TargetKind, TargetSpec,
};
use qsp_core::{residual_l1, solve, Result, SolverConfig};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("qsp-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let coef_path = dir.join("target.json");
    let phase_path = dir.join("phases.json");

    let spec = TargetSpec::new(TargetKind::Sin { tau: 50.0 }).with_scale(0.95);
    save_coeffs(&coef_path, &spec.build()?)?;
    println!("wrote {} ({})", coef_path.display(), spec.label());

    let loaded = load_coeffs(&coef_path)?;
    println!(
        "loaded degree {}, ‖f‖∞ = {:.6}",
        loaded.coeffs.degree(),
        loaded.infinity_norm
    );
    let (phi, report) = solve(&loaded.coeffs, &SolverConfig::newton())?;
    save_phases(&phase_path, &phi)?;
    println!(
        "solved in {} iterations, saved {}",
        report.iterations,
        phase_path.display()
    );

    let back = load_phases(&phase_path)?;
    assert_eq!(back.phases(), phi.phases(), "phases reload bit-exactly");
    println!(
        "reloaded residual {:.2e}",
        residual_l1(&back, &loaded.coeffs)?
    );

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

//! Locate the CNOT-style |10⟩ → |11⟩ transfer peak and print the full probe
//! report: gate time, forward/backward peak populations, residual populations
//! in the other channels, and the mirror-symmetry residual.
//!
//! Run with: `cargo run --release --example gate_probe`

use chronoq::analysis::cnot_probe;
use chronoq::integrate::IntegratorConfig;
use chronoq::SystemParameters;

fn main() -> Result<(), chronoq::Error> {
    let params = SystemParameters::default();
    let config = IntegratorConfig::default();

    // The drive on qubit 2 is detuned by w2, so the transfer tops out at
    // Ω²/(Ω² + w2²) ≈ 0.978; probe with a threshold below that ceiling.
    let report = cnot_probe(&params, &config, 400.0, 0.9)?;

    println!("gate time T            = {:.12}", report.gate_time);
    println!("peak p11 (forward)     = {:.12}", report.peak_population_forward);
    println!("peak p11 (backward)    = {:.12}", report.peak_population_backward);
    println!(
        "residual pops forward  = [{:.3e}, {:.3e}, {:.3e}]",
        report.residual_populations_forward[0],
        report.residual_populations_forward[1],
        report.residual_populations_forward[2],
    );
    println!("max norm error         = {:.3e}", report.max_norm_error);
    println!("mirror residual        = {:.3e}", report.mirror_residual);
    Ok(())
}

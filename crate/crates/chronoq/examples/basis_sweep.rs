//! Evolve every computational basis state to ±T and print the endpoint
//! populations as a truth table, showing which rows behave like a CNOT at
//! the gate time and confirming the forward/backward mirror numerically.
//!
//! Run with: `cargo run --release --example basis_sweep`

use chronoq::analysis::basis_sweep;
use chronoq::integrate::IntegratorConfig;
use chronoq::SystemParameters;

const GATE_TIME: f64 = 311.874538151179;

fn main() -> Result<(), chronoq::Error> {
    let params = SystemParameters::default();
    let config = IntegratorConfig::default();
    let rows = basis_sweep(&params, GATE_TIME, &config)?;

    let labels = ["|00⟩", "|01⟩", "|10⟩", "|11⟩"];
    println!("endpoint populations at t = ±{GATE_TIME}");
    println!("{:<6} {:>9} {:>9} {:>9} {:>9}   (forward == backward)", "init", "p00", "p01", "p10", "p11");
    for row in &rows {
        let p = row.populations_forward;
        let mirror = row
            .populations_forward
            .iter()
            .zip(row.populations_backward.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!(
            "{:<6} {:>9.5} {:>9.5} {:>9.5} {:>9.5}   mirror gap {:.1e}",
            labels[row.initial], p[0], p[1], p[2], p[3], mirror
        );
    }
    Ok(())
}

//! Integrate the default system forward and backward over a long window and
//! report how well the total probability is conserved along the way.
//!
//! Run with: `cargo run --release --example norm_conservation`

use chronoq::integrate::{evolve, IntegratorConfig};
use chronoq::{SystemParameters, TwoQubitState};

fn main() -> Result<(), chronoq::Error> {
    let params = SystemParameters::default();
    let init = TwoQubitState::basis(2); // |10⟩
    let config = IntegratorConfig {
        sample_stride: 100,
        ..IntegratorConfig::default()
    };

    for span in [1000.0, 5000.0] {
        let fwd = evolve(&params, &init, 0.0, span, &config)?;
        let bwd = evolve(&params, &init, 0.0, -span, &config)?;
        println!(
            "span ±{span:>6}: max |‖C‖² − 1| forward = {:.3e}, backward = {:.3e}",
            fwd.max_norm_error(),
            bwd.max_norm_error()
        );
    }
    Ok(())
}

//! Measure the empirical convergence order of the fixed-step RK4 integrator
//! by comparing against a fine-sliced propagator reference across a sequence
//! of step sizes. The fitted slope should sit close to 4.
//!
//! Run with: `cargo run --release --example convergence_order`

use chronoq::integrate::convergence_order;
use chronoq::{SystemParameters, TwoQubitState};

fn main() -> Result<(), chronoq::Error> {
    let params = SystemParameters::default();
    let init = TwoQubitState::basis(2);
    let steps = [0.1, 0.05, 0.025];

    let order = convergence_order(&params, &init, 100.0, &steps)?;
    println!("step sizes {steps:?} over t ∈ [0, 100]");
    println!("fitted convergence order = {order:.3} (expected ≈ 4)");
    Ok(())
}

//! Cross-validate the RK4 integrator against the independent piecewise-constant
//! midpoint propagator (exact exponentials via Jacobi eigendecomposition), which
//! shares no stepping code with the Runge–Kutta path. Also check the drive-off
//! special case against the closed-form diagonal solution.
//!
//! Run with: `cargo run --release --example oracle_crosscheck`

use chronoq::integrate::{evolve, IntegratorConfig};
use chronoq::oracle::{evolve_diagonal, evolve_propagator, PropagatorConfig};
use chronoq::{SystemParameters, TwoQubitState};

fn main() -> Result<(), chronoq::Error> {
    let params = SystemParameters::default();
    let init = TwoQubitState::basis(2);
    let rk_cfg = IntegratorConfig::default();
    let prop_cfg = PropagatorConfig::default();

    for t in [100.0, 500.0, 2000.0, -500.0] {
        let rk = evolve(&params, &init, 0.0, t, &rk_cfg)?;
        let prop = evolve_propagator(&params, &init, 0.0, t, &prop_cfg)?;
        println!(
            "t = {t:>7}: max amplitude gap rk4 vs propagator = {:.3e}",
            rk.final_state().max_amp_distance(&prop)
        );
    }

    // With the drive off the Hamiltonian is diagonal and solvable in closed form.
    let quiet = SystemParameters {
        omega: 0.0,
        ..params
    };
    let mixed = {
        let a = 0.5f64.sqrt();
        TwoQubitState::new([a.into(), 0.0.into(), a.into(), 0.0.into()])
    };
    let rk = evolve(&quiet, &mixed, 0.0, 750.0, &rk_cfg)?;
    let exact = evolve_diagonal(&quiet, &mixed, 750.0)?;
    println!(
        "drive off:  max amplitude gap rk4 vs closed form = {:.3e}",
        rk.final_state().max_amp_distance(&exact)
    );
    Ok(())
}

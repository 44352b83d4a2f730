//! Turns trajectories into claims: population curves, CNOT population
//! transfer detection, and forward/backward mirror-symmetry reports.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::integrate::{evolve, IntegratorConfig, Trajectory};
use crate::model::{SystemParameters, TwoQubitState};

/// (|c0|², |c1|², |c2|², |c3|²).
pub fn populations(state: &TwoQubitState) -> [f64; 4] {
    std::array::from_fn(|k| state.amps[k].norm_sqr())
}

/// The canonical gate-probe initial condition: exactly |10⟩.
pub fn cnot_initial() -> TwoQubitState {
    TwoQubitState::basis(2)
}

/// A detected population-transfer peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GatePeak {
    /// Refined peak time T.
    pub time: f64,
    /// |C3(T)|² evaluated at the refined time.
    pub population: f64,
}

/// Scan |C3(t)|² forward from |10⟩ and return the first local maximum
/// reaching `threshold`, refined by three-point parabolic interpolation.
/// Absence (no qualifying peak within `horizon`) is a value, not an error.
pub fn find_gate_time(
    params: &SystemParameters,
    config: &IntegratorConfig,
    horizon: f64,
    threshold: f64,
) -> Result<Option<GatePeak>, Error> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon must be > 0, got {horizon}"
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be in (0, 1], got {threshold}"
        )));
    }
    let traj = evolve(params, &cnot_initial(), 0.0, horizon, config)?;
    Ok(first_qualifying_peak(&traj, threshold, params, config)?)
}

/// Best |C3|² value seen along a forward scan (used for reporting when no
/// peak qualifies).
pub fn best_peak_seen(
    params: &SystemParameters,
    config: &IntegratorConfig,
    horizon: f64,
) -> Result<f64, Error> {
    let traj = evolve(params, &cnot_initial(), 0.0, horizon, config)?;
    Ok(traj
        .samples
        .iter()
        .map(|(_, s)| s.amps[3].norm_sqr())
        .fold(0.0, f64::max))
}

fn first_qualifying_peak(
    traj: &Trajectory,
    threshold: f64,
    params: &SystemParameters,
    config: &IntegratorConfig,
) -> Result<Option<GatePeak>, Error> {
    let p3: Vec<f64> = traj
        .samples
        .iter()
        .map(|(_, s)| s.amps[3].norm_sqr())
        .collect();
    for i in 1..p3.len().saturating_sub(1) {
        if p3[i] >= threshold && p3[i] >= p3[i - 1] && p3[i] > p3[i + 1] {
            let (t_prev, _) = traj.samples[i - 1];
            let (t_i, _) = traj.samples[i];
            let (t_next, _) = traj.samples[i + 1];
            let dt = 0.5 * (t_next - t_prev);
            // parabolic vertex from the three samples; shift stays within
            // one sample interval by construction of a local maximum
            let denom = p3[i - 1] - 2.0 * p3[i] + p3[i + 1];
            let shift = if denom.abs() > 0.0 {
                (0.5 * dt * (p3[i - 1] - p3[i + 1]) / denom).clamp(-dt, dt)
            } else {
                0.0
            };
            let t_peak = t_i + shift;
            let population = if t_peak == t_i {
                p3[i]
            } else {
                evolve(params, &cnot_initial(), 0.0, t_peak, config)?
                    .final_state()
                    .amps[3]
                    .norm_sqr()
            };
            return Ok(Some(GatePeak {
                time: t_peak,
                population,
            }));
        }
    }
    Ok(None)
}

/// Forward/backward gate-probe summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateProbeReport {
    pub gate_time: f64,
    pub peak_population_forward: f64,
    pub peak_population_backward: f64,
    /// (|C0|², |C1|², |C2|²) at +T.
    pub residual_populations_forward: [f64; 3],
    /// (|C0|², |C1|², |C2|²) at −T.
    pub residual_populations_backward: [f64; 3],
    /// Max over both runs of |norm² − 1|.
    pub max_norm_error: f64,
    /// max_k | |C_k(−T)|² − |C_k(T)|² |.
    pub mirror_residual: f64,
}

/// Detect the gate time, then evolve |10⟩ to +T and to −T and report both
/// endpoints. The backward run reuses the detected T with negated sign.
pub fn cnot_probe(
    params: &SystemParameters,
    config: &IntegratorConfig,
    horizon: f64,
    threshold: f64,
) -> Result<GateProbeReport, Error> {
    let peak = match find_gate_time(params, config, horizon, threshold)? {
        Some(p) => p,
        None => {
            let best_peak = best_peak_seen(params, config, horizon)?;
            return Err(Error::GateNotFound { best_peak });
        }
    };

    let init = cnot_initial();
    let forward = evolve(params, &init, 0.0, peak.time, config)?;
    let backward = evolve(params, &init, 0.0, -peak.time, config)?;
    let pf = populations(forward.final_state());
    let pb = populations(backward.final_state());

    let mirror_residual = (0..4)
        .map(|k| (pf[k] - pb[k]).abs())
        .fold(0.0, f64::max);

    Ok(GateProbeReport {
        gate_time: peak.time,
        peak_population_forward: pf[3],
        peak_population_backward: pb[3],
        residual_populations_forward: [pf[0], pf[1], pf[2]],
        residual_populations_backward: [pb[0], pb[1], pb[2]],
        max_norm_error: forward.max_norm_error().max(backward.max_norm_error()),
        mirror_residual,
    })
}

/// One row of [`basis_sweep`]: endpoint populations for a basis initial
/// state evolved to ±T. Exploratory output with no pass/fail judgment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSweepRow {
    /// Basis index of the initial state (0..=3 for |00⟩..|11⟩).
    pub initial: usize,
    pub populations_forward: [f64; 4],
    pub populations_backward: [f64; 4],
    pub max_norm_error: f64,
}

/// Evolve each computational basis state to ±T and report the endpoint
/// populations, making explicit which truth-table rows the dynamics realizes.
pub fn basis_sweep(
    params: &SystemParameters,
    t_final: f64,
    config: &IntegratorConfig,
) -> Result<[BasisSweepRow; 4], Error> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sweep time must be > 0, got {t_final}"
        )));
    }
    let mut rows = [BasisSweepRow {
        initial: 0,
        populations_forward: [0.0; 4],
        populations_backward: [0.0; 4],
        max_norm_error: 0.0,
    }; 4];
    for (k, row) in rows.iter_mut().enumerate() {
        let init = TwoQubitState::basis(k);
        let fwd = evolve(params, &init, 0.0, t_final, config)?;
        let bwd = evolve(params, &init, 0.0, -t_final, config)?;
        *row = BasisSweepRow {
            initial: k,
            populations_forward: populations(fwd.final_state()),
            populations_backward: populations(bwd.final_state()),
            max_norm_error: fwd.max_norm_error().max(bwd.max_norm_error()),
        };
    }
    Ok(rows)
}

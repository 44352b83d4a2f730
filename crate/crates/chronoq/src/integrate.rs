//! Signed-time numerical evolution of the two-qubit Schrödinger ODE.
//!
//! Backward evolution ("towards the past") is plain integration with a
//! negative step of the same ODE; nothing is negated or conjugated. The final
//! step is always shortened so the trajectory lands exactly on `t_end`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{rhs, SystemParameters, TwoQubitState};
use crate::oracle::{evolve_propagator, PropagatorConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FixedRk4,
    Adaptive45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Step for `FixedRk4`, initial step for `Adaptive45`.
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Record every k-th accepted step into the trajectory.
    pub sample_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::FixedRk4,
            dt: 0.01,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            sample_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be > 0".to_string(),
            ));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter(
                "sample_stride must be >= 1".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Time-ordered (t, state) samples from one `evolve` call.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, TwoQubitState)>,
    pub params: SystemParameters,
    pub direction: Direction,
    pub config: IntegratorConfig,
}

impl Trajectory {
    pub fn final_state(&self) -> &TwoQubitState {
        &self.samples.last().expect("trajectory is never empty").1
    }

    /// max over samples of |norm² − 1|.
    pub fn max_norm_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, s)| (s.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn axpy(y: &TwoQubitState, h: f64, k: &TwoQubitState) -> TwoQubitState {
    TwoQubitState::new(std::array::from_fn(|i| y.amps[i] + h * k.amps[i]))
}

/// One classical RK4 step of size `h` from (t, y).
fn rk4_step(params: &SystemParameters, t: f64, y: &TwoQubitState, h: f64) -> TwoQubitState {
    let k1 = rhs(params, t, y);
    let k2 = rhs(params, t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(params, t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(params, t + h, &axpy(y, h, &k3));
    TwoQubitState::new(std::array::from_fn(|i| {
        y.amps[i] + (h / 6.0) * (k1.amps[i] + 2.0 * k2.amps[i] + 2.0 * k3.amps[i] + k4.amps[i])
    }))
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns the 5th-order solution and the scaled
/// error estimate (<= 1 means acceptable).
fn dp45_step(
    params: &SystemParameters,
    t: f64,
    y: &TwoQubitState,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> (TwoQubitState, f64) {
    let mut k: [TwoQubitState; 7] = [TwoQubitState::zero(); 7];
    k[0] = rhs(params, t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            if DP_A[s][j] != 0.0 {
                ys = axpy(&ys, h * DP_A[s][j], kj);
            }
        }
        k[s] = rhs(params, t + DP_C[s] * h, &ys);
    }
    let y5 = TwoQubitState::new(std::array::from_fn(|i| {
        let mut acc = y.amps[i];
        for (s, ks) in k.iter().enumerate() {
            if DP_B5[s] != 0.0 {
                acc += h * DP_B5[s] * ks.amps[i];
            }
        }
        acc
    }));
    let mut err = 0.0f64;
    for i in 0..4 {
        let mut e = Complex64::new(0.0, 0.0);
        for (s, ks) in k.iter().enumerate() {
            let d = DP_B5[s] - DP_B4[s];
            if d != 0.0 {
                e += h * d * ks.amps[i];
            }
        }
        let scale = abs_tol + rel_tol * y.amps[i].norm().max(y5.amps[i].norm());
        err = err.max(e.norm() / scale);
    }
    (y5, err)
}

/// Integrate from `t_start` to `t_end`. `t_end < t_start` is legal and means
/// signed-time evolution into the past.
pub fn evolve(
    params: &SystemParameters,
    initial: &TwoQubitState,
    t_start: f64,
    t_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory, Error> {
    params.validate()?;
    config.validate()?;
    if !t_start.is_finite() || !t_end.is_finite() || t_start == t_end {
        return Err(Error::InvalidParameter(format!(
            "need finite t_start != t_end, got {t_start} and {t_end}"
        )));
    }
    if !initial.is_finite() {
        return Err(Error::Numerical("initial state is not finite".to_string()));
    }

    let direction = if t_end > t_start {
        Direction::Forward
    } else {
        Direction::Backward
    };
    let span = t_end - t_start;

    let mut samples = vec![(t_start, *initial)];
    match config.method {
        Method::FixedRk4 => {
            let h = config.dt.copysign(span);
            let n_full = (span.abs() / config.dt).floor() as u64;
            let mut y = *initial;
            let mut t = t_start;
            for i in 1..=n_full {
                y = rk4_step(params, t, &y, h);
                t = t_start + (i as f64) * h;
                if !y.is_finite() {
                    return Err(Error::Numerical(format!("non-finite state at t = {t}")));
                }
                if i as usize % config.sample_stride == 0 {
                    samples.push((t, y));
                }
            }
            // shortened final step lands exactly on t_end
            let rem = t_end - t;
            if rem != 0.0 {
                y = rk4_step(params, t, &y, rem);
                if !y.is_finite() {
                    return Err(Error::Numerical(format!("non-finite state at t = {t_end}")));
                }
            }
            if samples.last().map(|(ts, _)| *ts) != Some(t_end) {
                samples.push((t_end, y));
            } else {
                *samples.last_mut().unwrap() = (t_end, y);
            }
        }
        Method::Adaptive45 => {
            let min_h = 1e-14 * span.abs();
            let mut h = config.dt.min(span.abs()).copysign(span);
            let mut y = *initial;
            let mut t = t_start;
            let mut accepted: usize = 0;
            while t != t_end {
                if (t_end - t).abs() <= h.abs() {
                    h = t_end - t;
                }
                let (y_new, err) = dp45_step(params, t, &y, h, config.rel_tol, config.abs_tol);
                if !err.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite error estimate at t = {t}"
                    )));
                }
                if err <= 1.0 {
                    t = if (t + h - t_end).abs() < min_h { t_end } else { t + h };
                    y = y_new;
                    if !y.is_finite() {
                        return Err(Error::Numerical(format!("non-finite state at t = {t}")));
                    }
                    accepted += 1;
                    if accepted % config.sample_stride == 0 && t != t_end {
                        samples.push((t, y));
                    }
                }
                let factor = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    5.0
                };
                h *= factor;
                if h.abs() < min_h {
                    return Err(Error::Divergence(format!(
                        "adaptive step underflow at t = {t} (|h| = {})",
                        h.abs()
                    )));
                }
            }
            samples.push((t_end, y));
        }
    }

    Ok(Trajectory {
        samples,
        params: *params,
        direction,
        config: *config,
    })
}

/// Evolve 0 → T → 0 and return the max-amplitude distance back to `initial`.
pub fn roundtrip_residual(
    params: &SystemParameters,
    initial: &TwoQubitState,
    t_final: f64,
    config: &IntegratorConfig,
) -> Result<f64, Error> {
    if !(t_final > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "roundtrip time must be > 0, got {t_final}"
        )));
    }
    let out = evolve(params, initial, 0.0, t_final, config)?;
    let back = evolve(params, out.final_state(), t_final, 0.0, config)?;
    Ok(back.final_state().max_amp_distance(initial))
}

/// Estimate the observed order of the fixed RK4 scheme by comparing against
/// the piecewise-constant propagator at each step size and fitting
/// log(error) against log(dt). Errors at the rounding floor (< 1e-13) are
/// excluded from the fit.
pub fn convergence_order(
    params: &SystemParameters,
    initial: &TwoQubitState,
    t_final: f64,
    dt_sequence: &[f64],
) -> Result<f64, Error> {
    if dt_sequence.len() < 3 {
        return Err(Error::InvalidParameter(
            "need at least 3 step sizes".to_string(),
        ));
    }
    if !dt_sequence.windows(2).all(|w| w[0] > w[1]) || !dt_sequence.iter().all(|&d| d > 0.0) {
        return Err(Error::InvalidParameter(
            "dt_sequence must be strictly decreasing and positive".to_string(),
        ));
    }

    let dt_min = *dt_sequence.last().unwrap();
    // reference accurate well below the finest RK4 error; not smaller than
    // 1e-4, where the slice rounding walk starts to matter
    let oracle_cfg = PropagatorConfig {
        slice_dt: (dt_min / 2.0).min(1e-4),
    };
    let reference = evolve_propagator(params, initial, 0.0, t_final, &oracle_cfg)?;

    let mut points = Vec::new();
    for &dt in dt_sequence {
        let config = IntegratorConfig {
            method: Method::FixedRk4,
            dt,
            sample_stride: usize::MAX,
            ..IntegratorConfig::default()
        };
        let traj = evolve(params, initial, 0.0, t_final, &config)?;
        let err = traj.final_state().max_amp_distance(&reference);
        if err >= 1e-13 {
            points.push((dt.ln(), err.ln()));
        }
    }
    if points.len() < 2 {
        return Err(Error::Inconclusive(
            "errors at rounding floor for all but fewer than 2 step sizes".to_string(),
        ));
    }

    // least-squares slope
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

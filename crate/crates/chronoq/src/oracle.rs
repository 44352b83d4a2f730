//! Independent evolution backends used as ground truth for the integrator.
//!
//! Two routes that share nothing with the Runge-Kutta stepping code beyond
//! the Hamiltonian assembly itself: an exact closed form for the drive-free
//! (Ω = 0) diagonal case, and a piecewise-constant unitary propagator built
//! from Hermitian eigendecompositions (cyclic Jacobi rotations). Each slice
//! unitary is exact up to rounding, so the propagator preserves the norm
//! regardless of slice width.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{hamiltonian, HamiltonianMatrix, SystemParameters, TwoQubitState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorConfig {
    /// Width of each piecewise-constant slice; the Hamiltonian is frozen at
    /// the slice midpoint.
    pub slice_dt: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { slice_dt: 1e-3 }
    }
}

const MAX_SLICES: f64 = 1e9;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Exact solution for Ω = 0: each amplitude picks up the phase e^{−i·E_k·t}.
pub fn evolve_diagonal(
    params: &SystemParameters,
    initial: &TwoQubitState,
    t: f64,
) -> Result<TwoQubitState, Error> {
    params.validate()?;
    if params.omega != 0.0 {
        return Err(Error::Usage(format!(
            "evolve_diagonal requires omega = 0, got {}",
            params.omega
        )));
    }
    let m = hamiltonian(params, 0.0);
    let amps = std::array::from_fn(|k| {
        let energy = m.entries[k][k].re;
        Complex64::from_polar(1.0, -energy * t) * initial.amps[k]
    });
    Ok(TwoQubitState::new(amps))
}

/// Eigendecomposition of a 4×4 Hermitian matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvector columns V) with M = V·diag(λ)·V†.
pub fn jacobi_eigh(m: &HamiltonianMatrix) -> Result<([f64; 4], [[Complex64; 4]; 4]), Error> {
    let mut a = m.entries;
    // V starts as the identity and accumulates the rotations.
    let mut v = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (k, row) in v.iter_mut().enumerate() {
        row[k] = Complex64::new(1.0, 0.0);
    }

    let scale: f64 = a
        .iter()
        .flatten()
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);

    for sweep in 0..=MAX_JACOBI_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|p| (p + 1..4).map(move |q| (p, q)))
            .map(|(p, q)| 2.0 * a[p][q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        if sweep == MAX_JACOBI_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi did not converge in {MAX_JACOBI_SWEEPS} sweeps (off = {off:e})"
            )));
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // unit phase of the pivot and the real rotation angle
                let phase = apq / r;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase; // J[p][q]
                // A <- J† A J applied as column then row updates
                for i in 0..4 {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - sp.conj() * aiq;
                    a[i][q] = sp * aip + c * aiq;
                }
                for i in 0..4 {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - sp * aqi;
                    a[q][i] = sp.conj() * api + c * aqi;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - sp.conj() * viq;
                    row[q] = sp * vip + c * viq;
                }
            }
        }
    }

    let eigenvalues = std::array::from_fn(|k| a[k][k].re);
    Ok((eigenvalues, v))
}

/// The slice unitary U = exp(−i·M·dt) = V·diag(e^{−iλdt})·V†.
pub fn slice_unitary(m: &HamiltonianMatrix, dt: f64) -> Result<[[Complex64; 4]; 4], Error> {
    let (eigenvalues, v) = jacobi_eigh(m)?;
    let phases: [Complex64; 4] =
        std::array::from_fn(|k| Complex64::from_polar(1.0, -eigenvalues[k] * dt));
    let mut u = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            u[i][j] = (0..4).map(|k| v[i][k] * phases[k] * v[j][k].conj()).sum();
        }
    }
    Ok(u)
}

/// Compensated complex matvec (Dot2 with FMA): rounding error stays at one
/// ulp of the result instead of growing with the summation.
fn matvec(u: &[[Complex64; 4]; 4], x: &[Complex64; 4]) -> [Complex64; 4] {
    std::array::from_fn(|i| {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        let mut re_c = 0.0f64;
        let mut im_c = 0.0f64;
        let acc = |sum: &mut f64, comp: &mut f64, a: f64, b: f64| {
            let p = a * b;
            let p_err = f64::mul_add(a, b, -p);
            let s = *sum + p;
            let t = s - *sum;
            let s_err = (*sum - (s - t)) + (p - t);
            *sum = s;
            *comp += p_err + s_err;
        };
        for (m, c) in u[i].iter().zip(x.iter()) {
            acc(&mut re, &mut re_c, m.re, c.re);
            acc(&mut re, &mut re_c, -m.im, c.im);
            acc(&mut im, &mut im_c, m.re, c.im);
            acc(&mut im, &mut im_c, m.im, c.re);
        }
        Complex64::new(re + re_c, im + im_c)
    })
}

fn matvec_adjoint(u: &[[Complex64; 4]; 4], x: &[Complex64; 4]) -> [Complex64; 4] {
    let mut ut = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            ut[i][j] = u[j][i].conj();
        }
    }
    matvec(&ut, x)
}

/// Apply U to the state through one Newton polar-correction step,
/// (3·Uc − U·U†·Uc)/2, without ever rounding a corrected matrix into
/// storage. Keeps the systematic per-slice norm bias below the random
/// rounding walk, which matters over millions of slices.
fn apply(u: &[[Complex64; 4]; 4], state: &TwoQubitState) -> TwoQubitState {
    let y = matvec(u, &state.amps);
    let z = matvec(u, &matvec_adjoint(u, &y));
    TwoQubitState::new(std::array::from_fn(|i| 0.5 * (3.0 * y[i] - z[i])))
}

/// Evolve by the ordered product of midpoint-frozen slice unitaries.
pub fn evolve_propagator(
    params: &SystemParameters,
    initial: &TwoQubitState,
    t_start: f64,
    t_end: f64,
    config: &PropagatorConfig,
) -> Result<TwoQubitState, Error> {
    params.validate()?;
    if !(config.slice_dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "slice_dt must be > 0, got {}",
            config.slice_dt
        )));
    }
    let span = t_end - t_start;
    if span == 0.0 {
        return Ok(*initial);
    }
    let n = (span.abs() / config.slice_dt).ceil();
    if n > MAX_SLICES {
        return Err(Error::InvalidParameter(format!(
            "{n} slices exceeds the {MAX_SLICES} guard"
        )));
    }
    let n = n as u64;
    let dt = span / n as f64;

    let mut state = *initial;
    for k in 0..n {
        let t_mid = t_start + (k as f64 + 0.5) * dt;
        let u = slice_unitary(&hamiltonian(params, t_mid), dt)?;
        state = apply(&u, &state);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::cnot_initial;
    use crate::integrate::{evolve, IntegratorConfig};
    use proptest::prelude::*;

    fn omega_off() -> SystemParameters {
        SystemParameters {
            omega: 0.0,
            ..SystemParameters::default()
        }
    }

    #[test]
    fn diagonal_rejects_nonzero_omega() {
        let r = evolve_diagonal(&SystemParameters::default(), &cnot_initial(), 1.0);
        assert!(matches!(r, Err(Error::Usage(_))));
    }

    #[test]
    fn diagonal_preserves_populations() {
        let s = evolve_diagonal(&omega_off(), &TwoQubitState::basis(2), 123.0).unwrap();
        assert!((s.amps[2].norm_sqr() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn diagonal_phase_on_ground_state() {
        // E0 = -0.203, so C0 picks up e^{+i·0.203·10}
        let s = evolve_diagonal(&omega_off(), &TwoQubitState::basis(0), 10.0).unwrap();
        let expected = Complex64::from_polar(1.0, 0.203 * 10.0);
        assert!((s.amps[0] - expected).norm() <= 1e-12);
    }

    #[test]
    fn diagonal_superposition_populations() {
        let inv_sqrt2 = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let init = TwoQubitState::new([inv_sqrt2, zero, zero, inv_sqrt2]);
        let s = evolve_diagonal(&omega_off(), &init, 77.7).unwrap();
        assert!((s.amps[0].norm_sqr() - 0.5).abs() <= 1e-15);
        assert!((s.amps[3].norm_sqr() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn propagator_matches_diagonal_closed_form() {
        let p = omega_off();
        let init = TwoQubitState::basis(2);
        for slice_dt in [1.0, 0.1, 7.3] {
            let got =
                evolve_propagator(&p, &init, 0.0, 77.0, &PropagatorConfig { slice_dt }).unwrap();
            let exact = evolve_diagonal(&p, &init, 77.0).unwrap();
            assert!(got.max_amp_distance(&exact) <= 1e-12);
        }
    }

    #[test]
    fn propagator_identity_interval() {
        let init = cnot_initial();
        let got = evolve_propagator(
            &SystemParameters::default(),
            &init,
            5.0,
            5.0,
            &PropagatorConfig::default(),
        )
        .unwrap();
        assert_eq!(got, init);
    }

    #[test]
    fn propagator_agrees_with_rk4() {
        let p = SystemParameters::default();
        let init = cnot_initial();
        let rk = evolve(&p, &init, 0.0, 311.9, &IntegratorConfig::default()).unwrap();
        let prop =
            evolve_propagator(&p, &init, 0.0, 311.9, &PropagatorConfig::default()).unwrap();
        let d = rk.final_state().max_amp_distance(&prop);
        assert!(d <= 1e-6, "distance {d}");
    }

    #[test]
    fn propagator_norm_drift_over_many_slices() {
        let p = SystemParameters::default();
        // 1e6 slices
        let s = evolve_propagator(
            &p,
            &cnot_initial(),
            0.0,
            1000.0,
            &PropagatorConfig { slice_dt: 1e-3 },
        )
        .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() <= 1e-11);
    }

    #[test]
    fn midpoint_rule_is_second_order() {
        let p = SystemParameters::default();
        let init = cnot_initial();
        let tight = IntegratorConfig {
            method: crate::integrate::Method::Adaptive45,
            dt: 0.1,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            sample_stride: usize::MAX,
        };
        let reference = evolve(&p, &init, 0.0, 200.0, &tight).unwrap();
        let mut errors = Vec::new();
        for slice_dt in [0.8, 0.4, 0.2] {
            let got =
                evolve_propagator(&p, &init, 0.0, 200.0, &PropagatorConfig { slice_dt }).unwrap();
            errors.push(got.max_amp_distance(reference.final_state()));
        }
        let o1 = (errors[0] / errors[1]).log2();
        let o2 = (errors[1] / errors[2]).log2();
        for order in [o1, o2] {
            assert!((1.6..=2.4).contains(&order), "observed order {order}, errors {errors:?}");
        }
    }

    fn arb_params() -> impl Strategy<Value = SystemParameters> {
        (
            -1.0..1.0f64,
            -1.0..1.0f64,
            -0.1..0.1f64,
            0.0..0.5f64,
            -3.2..3.2f64,
            -3.2..3.2f64,
        )
            .prop_map(|(w1, w2, j, omega, phi1, phi2)| SystemParameters {
                w1,
                w2,
                j,
                omega,
                phi1,
                phi2,
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn slice_unitary_is_unitary(p in arb_params(), t in -100.0..100.0f64, dt in -2.0..2.0f64) {
            let u = slice_unitary(&hamiltonian(&p, t), dt).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let dot: Complex64 = (0..4).map(|k| u[k][i].conj() * u[k][j]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot - expected).norm() <= 1e-12);
                }
            }
        }

        #[test]
        fn eigendecomposition_reconstructs(p in arb_params(), t in -100.0..100.0f64) {
            let m = hamiltonian(&p, t);
            let (vals, v) = jacobi_eigh(&m).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let recon: Complex64 =
                        (0..4).map(|k| v[i][k] * vals[k] * v[j][k].conj()).sum();
                    prop_assert!((recon - m.entries[i][j]).norm() <= 1e-12);
                }
            }
        }
    }
}

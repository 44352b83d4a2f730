//! Domain types and assembly of the time-dependent two-qubit Hamiltonian.
//!
//! The system is a pair of driven spin-1/2 qubits with a ZZ coupling. In the
//! computational basis (|00⟩, |01⟩, |10⟩, |11⟩) the dynamics is
//! `i dC/dt = M(t) C` where `M(t)` is the 4×4 Hermitian matrix assembled by
//! [`hamiltonian`]. Natural units with ħ = 1 throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Physical constants of the two-qubit system.
///
/// `w1`, `w2` are the Larmor frequencies, `j` the ZZ coupling (either sign),
/// `omega` the Rabi frequency of the drive, and `phi1`, `phi2` the drive
/// phase offsets at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParameters {
    pub w1: f64,
    pub w2: f64,
    pub j: f64,
    pub omega: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl SystemParameters {
    pub fn new(w1: f64, w2: f64, j: f64, omega: f64, phi1: f64, phi2: f64) -> Result<Self, Error> {
        let p = Self {
            w1,
            w2,
            j,
            omega,
            phi1,
            phi2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("w1", self.w1),
            ("w2", self.w2),
            ("j", self.j),
            ("omega", self.omega),
            ("phi1", self.phi1),
            ("phi2", self.phi2),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.omega < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be >= 0, got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

/// Reference constants: J = 0.0015, Ω = 0.01, φ1 = π/2, φ2 = π/4,
/// w1 = 0.2, w2 = 0.0015.
impl Default for SystemParameters {
    fn default() -> Self {
        Self {
            w1: 0.2,
            w2: 0.0015,
            j: 0.0015,
            omega: 0.01,
            phi1: std::f64::consts::FRAC_PI_2,
            phi2: std::f64::consts::FRAC_PI_4,
        }
    }
}

/// Selects which qubit's drive phase to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    One,
    Two,
}

/// Drive phase θ_i = w_i·t + φ_i of the selected qubit.
pub fn drive_phase(params: &SystemParameters, qubit: Qubit, t: f64) -> f64 {
    match qubit {
        Qubit::One => params.w1 * t + params.phi1,
        Qubit::Two => params.w2 * t + params.phi2,
    }
}

/// A two-qubit pure state: four complex amplitudes over
/// (|00⟩, |01⟩, |10⟩, |11⟩).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub amps: [Complex64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [Complex64; 4]) -> Self {
        Self { amps }
    }

    /// The computational basis state with amplitude 1 on `index` (0..=3).
    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "basis index out of range: {index}");
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn zero() -> Self {
        Self {
            amps: [Complex64::new(0.0, 0.0); 4],
        }
    }

    /// |C0|² + |C1|² + |C2|² + |C3|².
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.amps
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest single-amplitude distance to `other`.
    pub fn max_amp_distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The 4×4 Hermitian matrix M(t) with `i dC/dt = M(t) C`.
///
/// Hermiticity is structural: the upper triangle is computed once and the
/// lower triangle written as its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianMatrix {
    pub entries: [[Complex64; 4]; 4],
}

impl HamiltonianMatrix {
    /// Matrix-vector product M·C.
    pub fn apply(&self, state: &TwoQubitState) -> TwoQubitState {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (row, o) in self.entries.iter().zip(out.iter_mut()) {
            *o = row
                .iter()
                .zip(state.amps.iter())
                .map(|(m, c)| m * c)
                .sum();
        }
        TwoQubitState { amps: out }
    }
}

/// Assemble M(t) for the given parameters.
///
/// Diagonal: (−(w1+w2)−J, −(w1−w2)+J, w1−w2+J, w1+w2−J). Off-diagonal
/// couplings are (Ω/2)·e^{∓iθ_i} on the four single-flip pairs; the
/// double-flip entries (0,3) and (1,2) are identically zero.
pub fn hamiltonian(params: &SystemParameters, t: f64) -> HamiltonianMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let half_omega = params.omega / 2.0;
    let theta1 = drive_phase(params, Qubit::One, t);
    let theta2 = drive_phase(params, Qubit::Two, t);
    // e^{-iθ} couplings of the upper triangle
    let g1 = half_omega * Complex64::from_polar(1.0, -theta1);
    let g2 = half_omega * Complex64::from_polar(1.0, -theta2);

    let e0 = -(params.w1 + params.w2) - params.j;
    let e1 = -(params.w1 - params.w2) + params.j;
    let e2 = (params.w1 - params.w2) + params.j;
    let e3 = (params.w1 + params.w2) - params.j;

    let entries = [
        [Complex64::new(e0, 0.0), g2, g1, zero],
        [g2.conj(), Complex64::new(e1, 0.0), zero, g1],
        [g1.conj(), zero, Complex64::new(e2, 0.0), g2],
        [zero, g1.conj(), g2.conj(), Complex64::new(e3, 0.0)],
    ];
    HamiltonianMatrix { entries }
}

/// Right-hand side of the Schrödinger ODE: dC/dt = −i·M(t)·C.
pub fn rhs(params: &SystemParameters, t: f64, state: &TwoQubitState) -> TwoQubitState {
    let mc = hamiltonian(params, t).apply(state);
    let minus_i = Complex64::new(0.0, -1.0);
    TwoQubitState {
        amps: mc.amps.map(|c| minus_i * c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn drive_phase_defaults_at_zero() {
        let p = SystemParameters::default();
        assert_eq!(drive_phase(&p, Qubit::One, 0.0), FRAC_PI_2);
        assert_eq!(drive_phase(&p, Qubit::Two, 0.0), FRAC_PI_4);
    }

    #[test]
    fn drive_phase_zero_case() {
        let p = SystemParameters::new(0.0, 0.0, 0.1, 0.2, 0.0, 0.0).unwrap();
        assert_eq!(drive_phase(&p, Qubit::One, 123.4), 0.0);
        assert_eq!(drive_phase(&p, Qubit::Two, -7.0), 0.0);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(SystemParameters::new(0.1, 0.1, 0.0, -0.01, 0.0, 0.0).is_err());
        assert!(SystemParameters::new(f64::NAN, 0.1, 0.0, 0.01, 0.0, 0.0).is_err());
        assert!(SystemParameters::new(0.1, f64::INFINITY, 0.0, 0.01, 0.0, 0.0).is_err());
    }

    #[test]
    fn hamiltonian_default_diagonal() {
        let m = hamiltonian(&SystemParameters::default(), 0.0);
        let diag: Vec<f64> = (0..4).map(|k| m.entries[k][k].re).collect();
        let expected = [-0.203, -0.197, 0.2, 0.2];
        for (d, e) in diag.iter().zip(expected.iter()) {
            assert!((d - e).abs() <= 1e-15, "diagonal {d} vs {e}");
        }
        for k in 0..4 {
            assert_eq!(m.entries[k][k].im, 0.0);
        }
    }

    #[test]
    fn hamiltonian_default_coupling_at_zero() {
        // θ1(0) = π/2 so M(0,2) = 0.005·e^{-iπ/2} = -0.005i
        let m = hamiltonian(&SystemParameters::default(), 0.0);
        assert!((m.entries[0][2] - c(0.0, -0.005)).norm() <= 1e-15);
        assert!((m.entries[2][0] - c(0.0, 0.005)).norm() <= 1e-15);
    }

    #[test]
    fn no_double_flip_coupling() {
        let p = SystemParameters::new(0.7, -0.3, 0.05, 0.2, 1.0, 2.0).unwrap();
        for t in [-50.0, 0.0, 13.7] {
            let m = hamiltonian(&p, t);
            assert_eq!(m.entries[0][3], c(0.0, 0.0));
            assert_eq!(m.entries[1][2], c(0.0, 0.0));
        }
    }

    #[test]
    fn rhs_diagonal_basis_state() {
        let p = SystemParameters::new(0.3, 0.1, 0.02, 0.0, 0.0, 0.0).unwrap();
        let e2 = (p.w1 - p.w2) + p.j;
        let d = rhs(&p, 5.0, &TwoQubitState::basis(2));
        assert!((d.amps[2] - c(0.0, -e2)).norm() <= 1e-15);
        for k in [0, 1, 3] {
            assert_eq!(d.amps[k], c(0.0, 0.0));
        }
    }

    #[test]
    fn rhs_zero_state() {
        let p = SystemParameters::default();
        let d = rhs(&p, 3.0, &TwoQubitState::zero());
        assert_eq!(d, TwoQubitState::zero());
    }

    #[test]
    fn rhs_default_coupling_row() {
        // row C3 picks up -i·(Ω/2)e^{iθ2(0)} from C2
        let p = SystemParameters::default();
        let d = rhs(&p, 0.0, &TwoQubitState::basis(2));
        let expected = c(0.0, -1.0) * 0.005 * Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((d.amps[3] - expected).norm() <= 1e-15);
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

    fn arb_state() -> impl Strategy<Value = TwoQubitState> {
        proptest::array::uniform8(-1.0..1.0f64).prop_map(|v| {
            TwoQubitState::new([
                c(v[0], v[1]),
                c(v[2], v[3]),
                c(v[4], v[5]),
                c(v[6], v[7]),
            ])
        })
    }

    proptest! {
        #[test]
        fn hamiltonian_is_hermitian(p in arb_params(), t in -1000.0..1000.0f64) {
            let m = hamiltonian(&p, t);
            for j in 0..4 {
                for k in 0..4 {
                    prop_assert_eq!(m.entries[j][k], m.entries[k][j].conj());
                }
            }
        }

        #[test]
        fn hamiltonian_is_traceless(p in arb_params(), t in -1000.0..1000.0f64) {
            let m = hamiltonian(&p, t);
            let tr: f64 = (0..4).map(|k| m.entries[k][k].re).sum();
            prop_assert!(tr.abs() <= 1e-15);
        }

        #[test]
        fn rhs_is_linear(
            p in arb_params(),
            t in -100.0..100.0f64,
            x in arb_state(),
            y in arb_state(),
            a in -2.0..2.0f64,
            b in -2.0..2.0f64,
        ) {
            let combined = TwoQubitState::new(std::array::from_fn(|k| {
                a * x.amps[k] + b * y.amps[k]
            }));
            let lhs = rhs(&p, t, &combined);
            let dx = rhs(&p, t, &x);
            let dy = rhs(&p, t, &y);
            for k in 0..4 {
                let rhs_k = a * dx.amps[k] + b * dy.amps[k];
                prop_assert!((lhs.amps[k] - rhs_k).norm() <= 1e-12);
            }
        }

        #[test]
        fn norm_derivative_vanishes(p in arb_params(), t in -100.0..100.0f64, x in arb_state()) {
            // d/dt ⟨C,C⟩ = 2 Re⟨C, dC/dt⟩ = 0 for Hermitian M
            let d = rhs(&p, t, &x);
            let inner: Complex64 = x
                .amps
                .iter()
                .zip(d.amps.iter())
                .map(|(c, dc)| c.conj() * dc)
                .sum();
            prop_assert!(inner.re.abs() <= 1e-13);
        }
    }
}

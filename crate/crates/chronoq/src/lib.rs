//! Numerical simulator for a driven, coupled two-qubit spin system.
//!
//! The dynamics is the Schrödinger equation `i dC/dt = M(t) C` for the four
//! computational-basis amplitudes, with a rotating drive on each qubit and a
//! ZZ coupling. The crate integrates it in both time directions, checks
//! probability conservation and unitarity, cross-validates against an
//! independent piecewise-constant propagator, and detects the CNOT-style
//! |10⟩ → |11⟩ population transfer together with its time-reversed mirror.
//!
//! Start with [`model::SystemParameters`] and [`integrate::evolve`]; see the
//! `examples/` directory for one runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod model;
pub mod oracle;

pub use error::Error;
pub use model::{SystemParameters, TwoQubitState};

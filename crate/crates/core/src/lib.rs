//! Semiclassical and quantized-field dynamics of coherent population return.
//!
//! The crate simulates driven few-level systems whose excited-state
//! population rises transiently during a smooth off-resonant pulse and
//! returns to zero afterwards.  It provides:
//!
//! * a fixed-step RK4 propagator for the time-dependent Schrodinger
//!   equation that never renormalizes, so norm drift stays visible as an
//!   accuracy diagnostic ([`Integrator`], [`propagate`]);
//! * the two-level rotating-wave model, its adiabatic basis, and the
//!   population-return predictions ([`two_level`]);
//! * a quantitative adiabaticity criterion for pulsed excitation
//!   ([`adiabaticity`]);
//! * a ten-state two-mode quantized-field model with energy and photon
//!   bookkeeping ([`jaynes_cummings`]);
//! * a three-level probe model that locates the dressed-state resonance a
//!   weak probe must hit while the strong pulse is on ([`three_level`]).

pub mod adiabaticity;
pub mod error;
pub mod grid;
pub mod integrator;
pub mod jaynes_cummings;
pub mod operator;
pub mod pulse;
pub mod state;
pub mod three_level;
pub mod two_level;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use integrator::{
    energy_rate_check, propagate, EnergyRateCheck, Integrator, Trajectory, NORM_DRIFT_LIMIT,
};
pub use operator::{expectation, ConstantHamiltonian, Hamiltonian, HermitianOperator};
pub use pulse::{make_envelope, PulseEnvelope, PulseShape};
pub use state::StateVector;

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;

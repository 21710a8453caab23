//! Two-level atom driven by a smooth pulse in the rotating-wave
//! approximation, the regime in which population parked in the excited state
//! during the pulse returns to the ground state once the pulse is over.
//!
//! Conventions (hbar = 1 throughout): the bare basis is `(psi1, psi2)`, the
//! Hamiltonian is `H = 1/2 [[0, W(t)], [W(t), 2 D]]` with Rabi frequency
//! `W(t) >= 0` and static detuning `D`, and the mixing angle
//! `theta = 1/2 atan2(W, D)` lives in `[0, pi/2]`.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::integrator::{Integrator, Trajectory};
use crate::operator::{Hamiltonian, HermitianOperator};
use crate::pulse::{PulseEnvelope, PulseShape};
use crate::state::StateVector;

/// Pulse, detuning and recording grid for a two-level run.
#[derive(Debug, Clone)]
pub struct TwoLevelParams {
    pub envelope: PulseEnvelope,
    pub detuning: f64,
    pub grid: TimeGrid,
}

impl TwoLevelParams {
    /// For localized pulse shapes the grid must cover at least three widths
    /// on either side of the pulse center, so that the run genuinely starts
    /// and ends outside the pulse.
    pub fn new(envelope: PulseEnvelope, detuning: f64, grid: TimeGrid) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter {
                name: "detuning",
                message: format!("must be finite, got {detuning}"),
            });
        }
        if envelope.shape() != PulseShape::Constant {
            let lo = envelope.center() - 3.0 * envelope.width();
            let hi = envelope.center() + 3.0 * envelope.width();
            if grid.t_start() > lo || grid.t_end() < hi {
                return Err(Error::InvalidParameter {
                    name: "grid",
                    message: format!(
                        "grid [{}, {}] must span the pulse support [{lo}, {hi}]",
                        grid.t_start(),
                        grid.t_end()
                    ),
                });
            }
        }
        Ok(Self {
            envelope,
            detuning,
            grid,
        })
    }
}

/// Rotating-wave Hamiltonian `1/2 [[0, W(t)], [W(t), 2 D]]`.
#[derive(Debug, Clone)]
pub struct RwaHamiltonian {
    envelope: PulseEnvelope,
    detuning: f64,
}

impl RwaHamiltonian {
    pub fn new(envelope: PulseEnvelope, detuning: f64) -> Self {
        Self { envelope, detuning }
    }

    pub fn rabi(&self, t: f64) -> f64 {
        self.envelope.value(t)
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }
}

impl Hamiltonian for RwaHamiltonian {
    fn dim(&self) -> usize {
        2
    }

    fn at(&self, t: f64) -> HermitianOperator {
        let half_rabi = C64::new(0.5 * self.envelope.value(t), 0.0);
        let m = Array2::from_shape_vec(
            (2, 2),
            vec![
                C64::new(0.0, 0.0),
                half_rabi,
                half_rabi,
                C64::new(self.detuning, 0.0),
            ],
        )
        .expect("2x2 shape");
        HermitianOperator::new(m).expect("symmetric by construction")
    }

    fn time_derivative(&self, t: f64) -> HermitianOperator {
        let half_dot = C64::new(0.5 * self.envelope.derivative(t), 0.0);
        let m = Array2::from_shape_vec(
            (2, 2),
            vec![C64::new(0.0, 0.0), half_dot, half_dot, C64::new(0.0, 0.0)],
        )
        .expect("2x2 shape");
        HermitianOperator::new(m).expect("symmetric by construction")
    }
}

/// Instantaneous Hamiltonian for `p`, evaluated as a matrix.
pub fn rwa_hamiltonian(p: &TwoLevelParams) -> RwaHamiltonian {
    RwaHamiltonian::new(p.envelope, p.detuning)
}

/// Mixing angle `theta = 1/2 atan2(W, D)`, in `[0, pi/2]` for `W >= 0`.
/// The doubly degenerate point `W = D = 0` returns 0 by convention.
pub fn mixing_angle(omega: f64, delta: f64) -> f64 {
    0.5 * omega.atan2(delta)
}

/// Instantaneous eigenvalues `(lambda_minus, lambda_plus)` of the
/// rotating-wave Hamiltonian, `1/2 (D -+ sqrt(W^2 + D^2))`.
pub fn adiabatic_eigenvalues(omega: f64, delta: f64) -> (f64, f64) {
    let root = omega.hypot(delta);
    (0.5 * (delta - root), 0.5 * (delta + root))
}

/// Instantaneous eigenstates `(Phi_minus, Phi_plus)` for mixing angle
/// `theta`: `Phi_minus = (cos, -sin)`, `Phi_plus = (sin, cos)`.
pub fn adiabatic_states(theta: f64) -> (StateVector, StateVector) {
    let (s, c) = theta.sin_cos();
    let minus = StateVector::new(vec![C64::new(c, 0.0), C64::new(-s, 0.0)])
        .expect("unit norm by construction");
    let plus = StateVector::new(vec![C64::new(s, 0.0), C64::new(c, 0.0)])
        .expect("unit norm by construction");
    (minus, plus)
}

/// Hamiltonian in the instantaneous eigenbasis,
/// `[[lambda_minus, -i theta_dot], [i theta_dot, lambda_plus]]` with
/// `theta_dot = W_dot D / (2 (W^2 + D^2))` for constant detuning.
pub fn adiabatic_hamiltonian(p: &TwoLevelParams, t: f64) -> Result<HermitianOperator> {
    let omega = p.envelope.value(t);
    let delta = p.detuning;
    let norm_sq = omega * omega + delta * delta;
    if norm_sq == 0.0 {
        return Err(Error::DegeneratePoint {
            context: "adiabatic_hamiltonian",
        });
    }
    let theta_dot = p.envelope.derivative(t) * delta / (2.0 * norm_sq);
    let (lo, hi) = adiabatic_eigenvalues(omega, delta);
    let m = Array2::from_shape_vec(
        (2, 2),
        vec![
            C64::new(lo, 0.0),
            C64::new(0.0, -theta_dot),
            C64::new(0.0, theta_dot),
            C64::new(hi, 0.0),
        ],
    )
    .expect("2x2 shape");
    HermitianOperator::new(m)
}

/// Adiabatic-following populations `(P1, P2) = (cos^2 theta, sin^2 theta)`
/// for a system that starts in the ground state and tracks `Phi_minus`.
pub fn cpr_populations(theta: f64) -> (f64, f64) {
    let s2 = theta.sin().powi(2);
    (1.0 - s2, s2)
}

/// Exact adiabatic excited-state population
/// `P2 = 1/2 - D / (2 sqrt(W^2 + D^2))`.
pub fn p2_exact(omega: f64, delta: f64) -> Result<f64> {
    let root = omega.hypot(delta);
    if root == 0.0 {
        return Err(Error::DegeneratePoint {
            context: "p2_exact",
        });
    }
    Ok(0.5 - delta / (2.0 * root))
}

/// Weak-field excited-state population in the form conventionally quoted,
/// `W^2 / D^2`.
///
/// Note: the second-order expansion of [`p2_exact`] is `W^2 / (4 D^2)`
/// ([`p2_weak_field_taylor`]); the two differ by exactly a factor of 4.
/// Both are provided so the discrepancy stays visible instead of being
/// silently folded into one convention.
pub fn p2_weak_field(omega: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidParameter {
            name: "detuning",
            message: "weak-field limit needs a nonzero detuning".into(),
        });
    }
    Ok(omega * omega / (delta * delta))
}

/// Second-order Taylor expansion of [`p2_exact`] in `W / D`:
/// `W^2 / (4 D^2)`.  See the note on [`p2_weak_field`].
pub fn p2_weak_field_taylor(omega: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidParameter {
            name: "detuning",
            message: "weak-field limit needs a nonzero detuning".into(),
        });
    }
    Ok(omega * omega / (4.0 * delta * delta))
}

/// Which of the two resonant levels a far-off-resonant state shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarkLevel {
    Lower,
    Upper,
}

/// One far-off-resonant state contributing to the differential Stark shift:
/// dipole projection onto the field polarization and detuning from the
/// indicated level.
#[derive(Debug, Clone, Copy)]
pub struct StarkTerm {
    pub level: StarkLevel,
    pub dipole: f64,
    pub detuning: f64,
}

/// Differential dynamic Stark shift of the two-level transition from a
/// manifold of far-off-resonant states,
/// `S = -(E^2 / 4) sum_i (d_upper_i^2 / D_upper_i - d_lower_i^2 / D_lower_i)`.
///
/// An empty manifold shifts nothing; a manifold symmetric between the two
/// levels cancels exactly.
pub fn dynamic_stark_shift(terms: &[StarkTerm], field: f64) -> Result<f64> {
    let mut sum = 0.0;
    for (index, term) in terms.iter().enumerate() {
        if term.detuning == 0.0 {
            return Err(Error::ZeroDetuning { index });
        }
        let contribution = term.dipole * term.dipole / term.detuning;
        match term.level {
            StarkLevel::Upper => sum += contribution,
            StarkLevel::Lower => sum -= contribution,
        }
    }
    Ok(-(field * field) / 4.0 * sum)
}

/// Propagates the pulse from the bare ground state and records the series
/// `P1`, `P2`, `E`, `theta` and `P2_adiabatic` (the adiabatic-following
/// prediction `sin^2 theta`).
pub fn simulate_cpr(p: &TwoLevelParams) -> Result<Trajectory> {
    simulate_cpr_with(p, &Integrator::default())
}

/// [`simulate_cpr`] with explicit integrator settings.
pub fn simulate_cpr_with(p: &TwoLevelParams, integrator: &Integrator) -> Result<Trajectory> {
    let h = rwa_hamiltonian(p);
    let psi0 = StateVector::basis_state(2, 0)?;
    let mut traj = integrator.propagate(&h, &psi0, &p.grid)?;

    let n = p.grid.len();
    let mut p1 = Vec::with_capacity(n);
    let mut p2 = Vec::with_capacity(n);
    let mut energy = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut p2_ad = Vec::with_capacity(n);
    for k in 0..n {
        let t = p.grid.at(k);
        let psi = traj.state(k);
        p1.push(psi.population(0));
        p2.push(psi.population(1));
        energy.push(h.at(t).expectation(psi)?);
        let th = mixing_angle(p.envelope.value(t), p.detuning);
        theta.push(th);
        p2_ad.push(th.sin().powi(2));
    }
    traj.insert_observable("P1", p1)?;
    traj.insert_observable("P2", p2)?;
    traj.insert_observable("E", energy)?;
    traj.insert_observable("theta", theta)?;
    traj.insert_observable("P2_adiabatic", p2_ad)?;
    Ok(traj)
}

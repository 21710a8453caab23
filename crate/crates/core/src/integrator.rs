use indexmap::IndexMap;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::operator::Hamiltonian;
use crate::state::StateVector;

/// Fixed-step fourth-order Runge-Kutta propagator for
/// `d psi / dt = -i H(t) psi`.
///
/// The state is *never* renormalized during propagation: norm drift is the
/// primary accuracy diagnostic, and scrubbing it would hide step-size
/// problems.  Propagation fails if the drift exceeds [`NORM_DRIFT_LIMIT`].
///
/// Each recording interval is subdivided so that
/// `substep * max_row_sum(H - offset*I) <= max_step_product`, with the row
/// sum taken as a cheap spectral bound over the recording grid.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    /// Budget for `substep_dt * spectral_bound`; 0.05 keeps the local RK4
    /// error near 3e-9 per step.
    pub max_step_product: f64,
    /// Optional hard cap on the substep length, applied on top of the
    /// spectral-bound policy.
    pub max_substep: Option<f64>,
    /// Constant diagonal offset subtracted from `H` while stepping and
    /// irrelevant to every observable (it contributes a global phase only).
    /// Model drivers use it to strip a large constant photon energy.
    pub energy_offset: f64,
}

/// Norm drift above this bound aborts the run with
/// [`Error::IntegrationFailure`].
pub const NORM_DRIFT_LIMIT: f64 = 1e-4;

impl Default for Integrator {
    fn default() -> Self {
        Self {
            max_step_product: 0.05,
            max_substep: None,
            energy_offset: 0.0,
        }
    }
}

impl Integrator {
    /// Propagates `psi0` across `grid`, recording the state at every grid
    /// point.
    pub fn propagate(
        &self,
        h: &dyn Hamiltonian,
        psi0: &StateVector,
        grid: &TimeGrid,
    ) -> Result<Trajectory> {
        let dim = h.dim();
        if psi0.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: psi0.dim(),
            });
        }
        if self.max_step_product.is_nan() || self.max_step_product <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "max_step_product",
                message: format!("must be > 0, got {}", self.max_step_product),
            });
        }

        let mut buf = Array2::<C64>::zeros((dim, dim));
        let substeps = self.substeps_per_interval(h, grid, &mut buf);
        let sub_dt = grid.dt() / substeps as f64;

        let mut psi: Array1<C64> = psi0.amplitudes().clone();
        let mut states = Vec::with_capacity(grid.len());
        states.push(StateVector::from_raw(psi.clone()));

        // rk4 work space, reused across all steps
        let mut k1 = Array1::<C64>::zeros(dim);
        let mut k2 = Array1::<C64>::zeros(dim);
        let mut k3 = Array1::<C64>::zeros(dim);
        let mut k4 = Array1::<C64>::zeros(dim);
        let mut stage = Array1::<C64>::zeros(dim);

        for interval in 0..grid.steps() {
            let t0 = grid.at(interval);
            let t1 = grid.at(interval + 1);
            let dt = (t1 - t0) / substeps as f64;
            for j in 0..substeps {
                let t = t0 + j as f64 * dt;

                self.write_shifted(h, t, &mut buf);
                rhs(&buf, &psi, &mut k1);

                self.write_shifted(h, t + 0.5 * dt, &mut buf);
                add_scaled(&psi, &k1, 0.5 * dt, &mut stage);
                rhs(&buf, &stage, &mut k2);
                add_scaled(&psi, &k2, 0.5 * dt, &mut stage);
                rhs(&buf, &stage, &mut k3);

                self.write_shifted(h, t + dt, &mut buf);
                add_scaled(&psi, &k3, dt, &mut stage);
                rhs(&buf, &stage, &mut k4);

                let w = dt / 6.0;
                for i in 0..dim {
                    psi[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
                }
            }
            states.push(StateVector::from_raw(psi.clone()));
        }

        let mut max_norm_drift: f64 = 0.0;
        for s in &states {
            let drift = (s.norm() - 1.0).abs();
            // a non-finite norm (divergence, NaN parameters) must abort too,
            // not slip through a max()
            if drift.is_nan() || drift > NORM_DRIFT_LIMIT {
                return Err(Error::IntegrationFailure {
                    drift,
                    limit: NORM_DRIFT_LIMIT,
                });
            }
            max_norm_drift = max_norm_drift.max(drift);
        }

        Ok(Trajectory {
            grid: *grid,
            states,
            observables: IndexMap::new(),
            max_norm_drift,
            substep_dt: sub_dt,
            substeps_per_interval: substeps,
        })
    }

    fn substeps_per_interval(
        &self,
        h: &dyn Hamiltonian,
        grid: &TimeGrid,
        buf: &mut Array2<C64>,
    ) -> usize {
        let mut bound: f64 = 0.0;
        for k in 0..grid.len() {
            self.write_shifted(h, grid.at(k), buf);
            let dim = buf.nrows();
            for i in 0..dim {
                let row: f64 = buf.row(i).iter().map(|z| z.norm()).sum();
                bound = bound.max(row);
            }
        }
        let mut n = if bound > 0.0 && self.max_step_product.is_finite() {
            (grid.dt() * bound / self.max_step_product).ceil() as usize
        } else {
            1
        };
        if let Some(cap) = self.max_substep {
            if cap > 0.0 {
                n = n.max((grid.dt() / cap).ceil() as usize);
            }
        }
        n.max(1)
    }

    fn write_shifted(&self, h: &dyn Hamiltonian, t: f64, buf: &mut Array2<C64>) {
        h.write_at(t, buf);
        if self.energy_offset != 0.0 {
            for i in 0..buf.nrows() {
                buf[(i, i)] -= self.energy_offset;
            }
        }
    }
}

/// `out = -i * H * v`
fn rhs(h: &Array2<C64>, v: &Array1<C64>, out: &mut Array1<C64>) {
    let n = v.len();
    for i in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += h[(i, j)] * v[j];
        }
        out[i] = C64::new(acc.im, -acc.re);
    }
}

/// `out = base + scale * delta`
fn add_scaled(base: &Array1<C64>, delta: &Array1<C64>, scale: f64, out: &mut Array1<C64>) {
    for i in 0..base.len() {
        out[i] = base[i] + scale * delta[i];
    }
}

/// Propagation with default integrator settings.
pub fn propagate(h: &dyn Hamiltonian, psi0: &StateVector, grid: &TimeGrid) -> Result<Trajectory> {
    Integrator::default().propagate(h, psi0, grid)
}

/// Recorded solution of a propagation run: one state per grid point plus any
/// named real-valued observable series attached by the model drivers.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: TimeGrid,
    states: Vec<StateVector>,
    observables: IndexMap<String, Vec<f64>>,
    max_norm_drift: f64,
    substep_dt: f64,
    substeps_per_interval: usize,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &StateVector {
        &self.states[k]
    }

    pub fn final_state(&self) -> &StateVector {
        self.states
            .last()
            .expect("a trajectory holds at least two states")
    }

    /// Largest `|norm - 1|` over the recorded states.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    pub fn substep_dt(&self) -> f64 {
        self.substep_dt
    }

    pub fn substeps_per_interval(&self) -> usize {
        self.substeps_per_interval
    }

    /// Attaches a named series; its length must match the grid.
    pub fn insert_observable(&mut self, name: impl Into<String>, series: Vec<f64>) -> Result<()> {
        if series.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: series.len(),
            });
        }
        self.observables.insert(name.into(), series);
        Ok(())
    }

    pub fn observable(&self, name: &str) -> Result<&[f64]> {
        self.observables
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::MissingObservable(name.to_string()))
    }

    /// Observable names in insertion order.
    pub fn observable_names(&self) -> impl Iterator<Item = &str> {
        self.observables.keys().map(|s| s.as_str())
    }
}

/// Result of the Ehrenfest energy-rate consistency check: the residual
/// between the finite-difference slope of `<H>` and `<dH/dt>`.
#[derive(Debug, Clone)]
pub struct EnergyRateCheck {
    /// Interior grid times where the centered difference is defined.
    pub times: Vec<f64>,
    /// `d<H>/dt (finite difference) - <dH/dt>` at those times.
    pub residuals: Vec<f64>,
    pub max_abs_residual: f64,
    /// Largest `|<dH/dt>|` over the interior points, the natural scale for
    /// judging the residual.
    pub max_abs_rate: f64,
}

/// Compares the numerical derivative of the energy expectation series against
/// the analytic `<dH/dt>` along a trajectory.
///
/// The finite difference is taken on the recording grid, so the grid must be
/// fine enough to resolve every oscillation that `<H>` actually contains.
pub fn energy_rate_check(traj: &Trajectory, h: &dyn Hamiltonian) -> Result<EnergyRateCheck> {
    let n = traj.grid().len();
    if n < 3 {
        return Err(Error::GridTooCoarse {
            needed: 3,
            actual: n,
        });
    }
    let energies: Vec<f64> = traj
        .states()
        .iter()
        .enumerate()
        .map(|(k, psi)| h.at(traj.grid().at(k)).expectation(psi))
        .collect::<Result<_>>()?;

    let dt = traj.grid().dt();
    let mut times = Vec::with_capacity(n - 2);
    let mut residuals = Vec::with_capacity(n - 2);
    let mut max_abs_residual: f64 = 0.0;
    let mut max_abs_rate: f64 = 0.0;
    for k in 1..n - 1 {
        let fd = (energies[k + 1] - energies[k - 1]) / (2.0 * dt);
        let expected = h
            .time_derivative(traj.grid().at(k))
            .expectation(traj.state(k))?;
        let r = fd - expected;
        times.push(traj.grid().at(k));
        residuals.push(r);
        max_abs_residual = max_abs_residual.max(r.abs());
        max_abs_rate = max_abs_rate.max(expected.abs());
    }
    Ok(EnergyRateCheck {
        times,
        residuals,
        max_abs_residual,
        max_abs_rate,
    })
}

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Normalized complex amplitude vector over a fixed basis.
///
/// `new` enforces unit norm at construction; states coming out of the
/// propagator are stored as-is so that norm drift stays visible as a
/// diagnostic instead of being silently scrubbed away.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    /// Norm-squared tolerance accepted at construction.
    pub const NORM_TOL: f64 = 1e-9;

    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                message: format!("state needs dimension >= 2, got {}", amplitudes.len()),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sq - 1.0).abs();
        if deviation > Self::NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self {
            amplitudes: Array1::from(amplitudes),
        })
    }

    /// Rescales an arbitrary nonzero vector onto the unit sphere.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter {
                name: "amplitudes",
                message: "cannot normalize the zero vector".into(),
            });
        }
        let scaled = amplitudes.into_iter().map(|a| a / norm).collect();
        Self::new(scaled)
    }

    /// Basis state `|k>` in a `dim`-dimensional space.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: k,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim.max(2)];
        amps[k] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// Wraps raw amplitudes without the unit-norm check.  Used for propagated
    /// states, whose norm is allowed to drift within the integrator's bound.
    pub(crate) fn from_raw(amplitudes: Array1<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> C64 {
        self.amplitudes[k]
    }

    /// Euclidean norm, `sqrt(sum |c_i|^2)`.
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Population of basis state `k`, `|c_k|^2`.
    pub fn population(&self, k: usize) -> f64 {
        self.amplitudes[k].norm_sqr()
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Euclidean norm of a state; see [`StateVector::norm`].
pub fn norm(psi: &StateVector) -> f64 {
    psi.norm()
}

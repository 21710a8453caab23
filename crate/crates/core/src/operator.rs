use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Square complex matrix that is conjugate-symmetric *exactly as constructed*:
/// `entries[(i, j)] == conj(entries[(j, i)])` with no floating-point slack.
/// Model builders write both triangles from the same scalar, so the check is
/// free of rounding concerns.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: Array2<C64>,
}

impl HermitianOperator {
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let (rows, cols) = entries.dim();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                actual: cols,
            });
        }
        for i in 0..rows {
            for j in i..cols {
                let upper = entries[(i, j)];
                let lower = entries[(j, i)];
                if upper.re != lower.re || upper.im != -lower.im {
                    return Err(Error::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Zero operator of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: Array2::zeros((dim, dim)),
        }
    }

    /// Real diagonal operator.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut entries = Array2::zeros((diag.len(), diag.len()));
        for (k, &d) in diag.iter().enumerate() {
            entries[(k, k)] = C64::new(d, 0.0);
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    /// Largest absolute-value row sum; a cheap upper bound on the spectral
    /// radius used to pick integration steps.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.entries.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Matrix-vector product `H |psi>`.
    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: psi.dim(),
            });
        }
        Ok(self.entries.dot(psi.amplitudes()))
    }

    /// Real quadratic form `<psi|H|psi>`.  The imaginary residue vanishes for
    /// a Hermitian matrix up to rounding; anything above 1e-10 indicates a
    /// broken invariant, so it is asserted rather than returned.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let h_psi = self.apply(psi)?;
        let value: C64 = psi
            .amplitudes()
            .iter()
            .zip(h_psi.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(
            value.im.abs() < 1e-10 * value.re.abs().max(1.0),
            "non-real expectation value {value}"
        );
        Ok(value.re)
    }
}

/// Real expectation value `<psi|op|psi>`; see [`HermitianOperator::expectation`].
pub fn expectation(op: &HermitianOperator, psi: &StateVector) -> Result<f64> {
    op.expectation(psi)
}

/// Time-dependent Hermitian generator of the dynamics, `H(t)` with hbar = 1.
///
/// `write_at` exists so the propagator can fill a preallocated buffer in its
/// inner loop; models with cached matrix templates override it.
pub trait Hamiltonian {
    fn dim(&self) -> usize;

    /// Hamiltonian matrix at time `t`.
    fn at(&self, t: f64) -> HermitianOperator;

    /// Analytic partial derivative with respect to time at fixed state,
    /// i.e. the envelope-derivative part of `H(t)`.
    fn time_derivative(&self, t: f64) -> HermitianOperator;

    fn write_at(&self, t: f64, out: &mut Array2<C64>) {
        out.assign(self.at(t).entries());
    }
}

/// Time-independent Hamiltonian, mostly useful for tests and oracles.
#[derive(Debug, Clone)]
pub struct ConstantHamiltonian {
    op: HermitianOperator,
}

impl ConstantHamiltonian {
    pub fn new(op: HermitianOperator) -> Self {
        Self { op }
    }
}

impl Hamiltonian for ConstantHamiltonian {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn at(&self, _t: f64) -> HermitianOperator {
        self.op.clone()
    }

    fn time_derivative(&self, _t: f64) -> HermitianOperator {
        HermitianOperator::zeros(self.op.dim())
    }
}

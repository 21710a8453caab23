use thiserror::Error;

/// Everything that can go wrong while building models or propagating states.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor argument violated its documented range.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// Vector / matrix dimensions do not line up.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A matrix handed to `HermitianOperator::new` was not conjugate-symmetric.
    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    /// A state vector failed the unit-norm check at construction.
    #[error("state vector is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// Both the coupling and the detuning vanish, so the adiabatic basis is
    /// undefined at this point.
    #[error("degenerate point (coupling and detuning both zero) in {context}")]
    DegeneratePoint { context: &'static str },

    /// A Stark-shift term carries a zero detuning; the perturbative shift
    /// diverges there.
    #[error("zero detuning in Stark manifold entry {index}")]
    ZeroDetuning { index: usize },

    /// Norm drift exceeded the accepted bound during propagation.  The step
    /// size is too large for this Hamiltonian; rerun with a smaller step.
    #[error(
        "integration failure: norm drift {drift:.3e} exceeds {limit:.1e} \
         (reduce the step size)"
    )]
    IntegrationFailure { drift: f64, limit: f64 },

    /// An operation needed more grid points than the caller supplied.
    #[error("grid too coarse: {needed} points required, got {actual}")]
    GridTooCoarse { needed: usize, actual: usize },

    /// A trajectory was asked for an observable series it does not carry.
    #[error("trajectory has no observable named `{0}`")]
    MissingObservable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

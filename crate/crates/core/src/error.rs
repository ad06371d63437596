use thiserror::Error;

/// Errors raised by the algebraic, geometric and lattice layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient array is not antisymmetric at ({i}, {j}, {k}): |c_ij^k + c_ji^k| = {defect:e}")]
    NotAntisymmetric {
        i: usize,
        j: usize,
        k: usize,
        defect: f64,
    },

    #[error("non-finite coefficient at {index:?}")]
    NonFinite { index: Vec<usize> },

    #[error("double algebra violates the Jacobi identity: defect {defect:e} at basis triple {triple:?}")]
    DoubleJacobiFailure { defect: f64, triple: [usize; 3] },

    #[error("adjoint matrix has a non-zero lower-left block (max {defect:e}); point is not in the base subgroup")]
    ZeroBlockViolation { defect: f64 },

    #[error("chart boundary reached at coordinates {coords:?} (condition number {condition:e})")]
    ChartBoundary { coords: Vec<f64>, condition: f64 },

    #[error("matrix exponential overflow (norm {norm:e})")]
    Overflow { norm: f64 },

    #[error("algebra is not semisimple (|det K| = {det:e})")]
    NotSemisimple { det: f64 },

    #[error("bialgebra is not coboundary: relative residual {residual:e}")]
    NotCoboundary { residual: f64 },

    #[error("logarithm failed: {reason}")]
    LogFailure { reason: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },

    #[error("shape mismatch: expected {expected}, got {actual}")]
    ShapeMismatch { expected: String, actual: String },

    #[error("matrix is not Hermitian (|A - A^dagger|_F = {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("trace is {trace:.12}, expected 1 (residual {residual:.3e})")]
    TraceNotOne { trace: f64, residual: f64 },

    #[error("matrix is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("vector is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("digit {digit} at position {position} is outside Z_{level}")]
    DigitOutOfRange { digit: usize, position: usize, level: usize },

    #[error("position {position} is outside 1..={length}")]
    PositionOutOfRange { position: usize, length: usize },

    #[error("count {count} is outside 0..={max}")]
    CountOutOfRange { count: usize, max: usize },

    #[error("not a permutation of 1..={length}: {detail}")]
    NotAPermutation { length: usize, detail: String },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("insertion block constraint violated: {0}")]
    BlockConstraintViolated(String),

    #[error("deleting the inserted positions does not return the original state (residual {residual:.3e})")]
    RoundTripFailed { residual: f64 },

    #[error("states have different qudit levels ({left} vs {right})")]
    LevelMismatch { left: usize, right: usize },

    #[error("need at least two states, got {0}")]
    TooFewStates(usize),

    #[error("dimension {dim} exceeds the size cap {cap}")]
    SizeCapExceeded { dim: usize, cap: usize },

    #[error("Dicke weight {weight} is outside 0..={length}")]
    WeightOutOfRange { weight: usize, length: usize },

    #[error("degenerate codeword parameter: {0}")]
    DegenerateParam(String),

    #[error("parse error: {0}")]
    Parse(String),
}

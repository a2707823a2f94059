use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("{n} qubits exceeds the dense limit of {max}")]
    DenseGuard { n: usize, max: usize },
    #[error("invalid gate targets: {0}")]
    InvalidTarget(String),
    #[error("hamiltonian is not diagonal in the computational basis")]
    NotDiagonal,
    #[error("hamiltonian is not hermitian")]
    NonHermitian,
    #[error("basis is not orthonormal (max deviation {0:e})")]
    NonOrthonormal(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parameter {0} is never used by the circuit")]
    UnusedParameter(usize),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("time step too large: {0}")]
    StepGuard(String),
    #[error("norm drift {0:e} exceeds tolerance")]
    NormDrift(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

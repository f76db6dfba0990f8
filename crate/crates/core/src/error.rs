use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Structural problem in an FCIDUMP header or value line.
    #[error("FCIDUMP format error (line {line}): {message}")]
    Format { line: usize, message: String },

    #[error("index out of range: {0}")]
    Bounds(String),

    /// Integrals or operators that break a required symmetry.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("register size mismatch: expected {expected} qubits, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid pool entry: {0}")]
    InvalidEntry(String),

    #[error("invalid pool combination: {0}")]
    InvalidCombination(String),

    /// A generator handed to the simulator is not anti-Hermitian.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parameter vector has length {found}, ansatz has {expected} operators")]
    ParameterLength { expected: usize, found: usize },

    /// The objective produced a non-finite value; carries the last finite iterate.
    #[error("optimizer diverged after {iterations} iterations")]
    OptimizerDiverged { iterations: usize, last_iterate: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("run-trace schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("matrix is not unitary (max deviation of U^dag U from I is {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("cannot normalize a zero vector")]
    ZeroNorm,

    #[error("expected {expected} local operators, got {got}")]
    OperatorCount { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("vertex {vertex} out of range for graph on {n_vertices} vertices")]
    InvalidVertex { vertex: usize, n_vertices: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid class id {0} (expected 1..=6)")]
    InvalidClass(usize),

    #[error("unknown name {name:?}; valid: {valid}")]
    UnknownName { name: String, valid: String },

    #[error("sample count {0} must be even and positive")]
    OddSampleCount(usize),

    #[error("graph class enumeration is inconsistent: {0}")]
    Enumeration(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid coupling ({i}, {j}) for {n} variables: indices must satisfy i < j < n")]
    InvalidCoupling { i: usize, j: usize, n: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("sub-problem needs {qubits} qubits, exceeding the cap of {cap}")]
    QubitCapExceeded { qubits: usize, cap: usize },

    #[error("solving instance `{id}` failed: {source}")]
    InstanceSolve {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed instance file: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool error: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state is not normalized (|norm^2 - 1| = {deviation:e})")]
    NotNormalized { deviation: f64 },

    #[error("non-finite amplitude at index {index}")]
    NonFinite { index: usize },

    #[error("amplitude array of length {len} is not 2^n for 1 <= n <= {max_qubits}")]
    BadLength { len: usize, max_qubits: usize },

    #[error("invalid qubit subset {subset:?} for a {n_qubits}-qubit system")]
    InvalidSubset { subset: Vec<usize>, n_qubits: usize },

    #[error("operator is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown state name `{0}`")]
    UnknownState(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

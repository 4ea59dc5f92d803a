use thiserror::Error;

use crate::qasm::QasmError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register of {qubits} qubits exceeds the cap of {cap}")]
    RegisterTooLarge { qubits: usize, cap: usize },
    #[error("circuit contains a measurement on qubit {0}")]
    MeasurementPresent(usize),
    #[error("gate `{0}` is not supported by this operation")]
    UnsupportedGate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Qasm(#[from] QasmError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

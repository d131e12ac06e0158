use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("mask bits set above qubit {n_qubits}")]
    MaskOutOfRange { n_qubits: usize },

    #[error("gate is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),

    #[error("{what}: {n_qubits} qubits exceeds the dense limit of {limit}")]
    DenseLimit {
        what: &'static str,
        n_qubits: usize,
        limit: usize,
    },

    #[error("subset must be non-empty")]
    EmptySubset,

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("group {group} contains non-commuting terms")]
    NonCommutingGroup { group: usize },

    #[error("term count {terms} exceeds budget {budget}")]
    TermBudget { terms: usize, budget: usize },

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by exceeding a size limit rather than by bad input.
    pub fn is_numeric_limit(&self) -> bool {
        matches!(self, Error::DenseLimit { .. } | Error::TermBudget { .. })
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

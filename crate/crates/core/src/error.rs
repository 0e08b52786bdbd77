use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("state is not positive: Gram matrix eigenvalue {min_eigenvalue:e}")]
    PositivityViolation { min_eigenvalue: f64 },

    #[error("state leaks outside the factored eigenspace: weight {weight:e}")]
    Leakage { weight: f64 },

    #[error("system Hamiltonian is not DF-compatible: residual {residual:e} ({detail})")]
    NotDfCompatible { residual: f64, detail: String },

    #[error("dimension budget exceeded: {dim} > {max}")]
    DimensionBudget { dim: usize, max: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

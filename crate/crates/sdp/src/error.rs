use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("program too large: {0}")]
    TooLarge(String),
    #[error("unsupported in SDPA export: {0}")]
    Unsupported(String),
    #[error("SDPA parse error: {0}")]
    Parse(String),
    #[error("non-Hermitian data: {0}")]
    NotHermitian(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
}

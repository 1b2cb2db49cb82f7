use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subsystem label {0:?} appears more than once")]
    LabelCollision(String),
    #[error("unknown subsystem label {0:?}")]
    UnknownLabel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("linear program is infeasible")]
    Infeasible(Box<crate::simplex::FarkasCertificate>),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("channel is not PPT across the output/input cut (min eigenvalue {0:e})")]
    NotHorodecki(f64),
    #[error("operation is signalling from Bob to Alice (residual {0:e})")]
    Signalling(f64),
    #[error(transparent)]
    Solver(#[from] nsppt_sdp::SolverError),
    #[error("SDP solver stopped without converging: {0}")]
    SolverStatus(String),
}

pub type Result<T> = std::result::Result<T, Error>;

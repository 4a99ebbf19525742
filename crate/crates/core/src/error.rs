use std::path::PathBuf;

use thiserror::Error;

use crate::solvers::SolverReport;

pub type Result<T, E = QspError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum QspError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {0} lies outside [-1, 1]")]
    Domain(f64),

    #[error("phase index {index} out of range for {len} phase factors")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("parity mismatch between phase factors and coefficients")]
    ParityMismatch,

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    /// Newton's method hit a singular Jacobian. The report covers the
    /// iterations completed before the breakdown.
    #[error("Newton breakdown at iteration {}: singular Jacobian", .report.iterations)]
    NewtonBreakdown { report: Box<SolverReport> },

    #[error("malformed file {path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("entry ({row}, {col}) lies outside the declared band but is nonzero")]
    BandViolation { row: usize, col: usize },
    #[error("QR iteration stalled at subdiagonal index {index} after {iterations} iterations")]
    NoDeflation { index: usize, iterations: usize },
    #[error("singular pivot {pivot:e} at column {column}")]
    SingularPivot { column: usize, pivot: f64 },
    #[error("inverse iteration did not converge in {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

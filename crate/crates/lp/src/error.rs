use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} references unknown column {col} (model has {ncols} columns)")]
    UnknownColumn { row: usize, col: usize, ncols: usize },
    #[error("column {col}: lower bound {lower} exceeds upper bound {upper}")]
    InvalidBounds { col: usize, lower: f64, upper: f64 },
    #[error("non-finite coefficient in row {row}")]
    NonFinite { row: usize },
    #[error("basis has {got} entries, model needs {expected}")]
    BasisShape { expected: usize, got: usize },
}

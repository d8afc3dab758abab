use alloc::string::String;

/// Errors raised by the algebra, operator and model layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid cone shape: {0}")]
    InvalidShape(&'static str),
    #[error("element does not match the cone shape")]
    ShapeMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("symmetric eigensolver failed on block {block}")]
    EigenFailure { block: usize },
    #[error("element is not interior to the cone (lambda_min = {lambda_min:e})")]
    NotInterior { lambda_min: f64 },
    #[error("multiplier recovery residual {residual:e} exceeds {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("basic procedure exhausted its budget of {iterations} iterations")]
    BudgetExhausted { iterations: usize },
    #[error("no certificate rule applies to the point")]
    Unclassifiable,
    #[error("status problem solution is inconsistent: {0}")]
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;

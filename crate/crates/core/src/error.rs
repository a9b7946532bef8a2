use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("predictions and labels differ in length ({predictions} vs {labels})")]
    LengthMismatch { predictions: usize, labels: usize },

    #[error("label at index {index} is {value}, expected -1 or 1")]
    InvalidLabel { index: usize, value: i64 },

    #[error("prediction at index {index} is not finite ({value})")]
    NonFinitePrediction { index: usize, value: f64 },

    #[error("margin must be finite and non-negative, got {0}")]
    InvalidMargin(f64),

    #[error("AUC undefined: need at least one positive and one negative (got {n_pos} positive, {n_neg} negative)")]
    AucUndefined { n_pos: usize, n_neg: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible imbalance ratio {imratio}: {reason}")]
    InfeasibleImratio { imratio: f64, reason: String },

    #[error("every grid cell diverged or produced no epochs ({cells} cells)")]
    AllDiverged { cells: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("excitation {0} is below the minimum of -1")]
    InvalidExcitation(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "truncation at n_max = {n_max} discards weight {weight:.3e} \
         (tolerance {tolerance:.1e}); n_max >= {required} is required"
    )]
    Truncation {
        n_max: usize,
        required: usize,
        weight: f64,
        tolerance: f64,
    },

    #[error("Bloch vector length {0} exceeds 1; reduced state is not positive")]
    Positivity(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed time-series file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

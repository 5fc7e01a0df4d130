use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("window mismatch: expected radius {expected}, found {found}")]
    WindowMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("sample {index} lies outside [-π, π]: coordinate {axis} = {value}")]
    SampleOutOfWindow { index: usize, axis: usize, value: f64 },

    #[error("energy has imaginary residue {residue:e}; coefficients are not hermitian")]
    NotHermitian { residue: f64 },

    #[error("density is not positive at grid point {point:?} (value {value})")]
    NonPositiveDensity { point: Vec<f64>, value: f64 },

    #[error("degenerate estimate: total mass {mass}")]
    DegenerateEstimate { mass: f64 },

    #[error("covariance is not positive definite")]
    NotPositiveDefinite,

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Whether the error stems from bad user input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NotHermitian { .. } | Error::DegenerateEstimate { .. })
    }
}

use thiserror::Error;

/// Failure modes shared by every module of the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("dimension: {0}")]
    Dimension(String),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NonHermitian(f64),
    #[error("singular kernel: {0}")]
    Singularity(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("exponent: {0}")]
    Exponent(String),
    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("quadrature failed: {0}")]
    QuadratureFail(String),
    #[error("fit needs at least 3 points, got {0}")]
    FitUnderdetermined(usize),
    #[error("nonpositive error value {0:e} cannot be fitted on a log scale")]
    NonpositiveError(f64),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
    #[error("linear algebra backend: {0}")]
    Backend(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

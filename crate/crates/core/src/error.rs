use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    InvalidMatrix,
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (min eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),
    #[error("pseudo-covariance is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("augmented covariance is infeasible (min eigenvalue {0:.3e})")]
    InfeasibleSecondOrder(f64),
    #[error("noise correlation infeasible (min eigenvalue of I - AA^H is {0:.3e})")]
    InfeasibleNoiseCorrelation(f64),
    #[error("dimension mismatch: {0}")]
    DimensionError(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexError { index: usize, dim: usize },
    #[error("invalid partition: {0}")]
    PartitionError(String),
    #[error("channel is not degraded (min eigenvalue of the channel gap is {0:.3e})")]
    NotDegraded(f64),
    #[error("invalid sample count: {0}")]
    CountError(String),
    #[error("invalid configuration: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, Error>;

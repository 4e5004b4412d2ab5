use thiserror::Error;

/// Failure modes shared by every analysis in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("matrix is singular to working precision ({0})")]
    Singular(String),
    #[error("Grushin problem is not well-posed: {0}")]
    IllPosed(String),
    #[error("effective Hamiltonian is singular; lambda lies in the spectrum")]
    EffectiveHamiltonianSingular,
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("frequency grid is empty")]
    EmptyGrid,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("generator is not diagonalizable (eigenvector condition number {0:.3e})")]
    NonDiagonalizable(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("contour passes too close to the spectrum: {0}")]
    ContourThroughSpectrum(String),
    #[error("transfer function is singular on the contour: {0}")]
    TransferSingularOnContour(String),
    #[error("mode {index} has zero moment weight and is unreachable")]
    DegenerateMode { index: usize },
    #[error("generator is not skew-adjoint: |A* + A| = {0:.3e}")]
    NotSkewAdjoint(f64),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable identifier of the variant, used in structured error records.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::Singular(_) => "Singular",
            Error::IllPosed(_) => "IllPosed",
            Error::EffectiveHamiltonianSingular => "EffectiveHamiltonianSingular",
            Error::Overflow => "Overflow",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::EmptyGrid => "EmptyGrid",
            Error::HypothesisViolated(_) => "HypothesisViolated",
            Error::NonDiagonalizable(_) => "NonDiagonalizable",
            Error::InvalidWeights(_) => "InvalidWeights",
            Error::ContourThroughSpectrum(_) => "ContourThroughSpectrum",
            Error::TransferSingularOnContour(_) => "TransferSingularOnContour",
            Error::DegenerateMode { .. } => "DegenerateMode",
            Error::NotSkewAdjoint(_) => "NotSkewAdjoint",
            Error::NoConvergence => "NoConvergence",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}

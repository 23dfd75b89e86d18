use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("trace is {trace:.12}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigen/singular value solver did not converge")]
    ConvergenceFailure,

    #[error("density matrix has no bipartite split")]
    MissingSplit,

    #[error("split {a}x{b} does not factor dimension {dim}")]
    InvalidSplit { a: usize, b: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("operator basis is not complete")]
    IncompleteBasis,

    #[error("operator basis is complete; use the full coherence measure instead")]
    CompleteBasisGiven,

    #[error("basis has no product structure")]
    NotProductBasis,

    #[error("Schatten-1 on a truncated basis is only an approximate bound; request the approximate estimator explicitly")]
    IncompatibleNormForBound,

    #[error("identity operator is not in the span of the factor basis")]
    IdentityNotInSpan,

    #[error("Kraus operators are not trace preserving (max deviation {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("incoherent Kraus coefficients are not normalized for column {column} (sum |c|^2 = {sum:.12})")]
    UnnormalizedCoefficients { column: usize, sum: f64 },

    #[error("invalid permutation for Kraus operator {index}")]
    InvalidPermutation { index: usize },

    #[error("invalid rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("parameter out of domain: {0}")]
    DomainError(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("published density matrix has trace {trace:.12} (expected 1)")]
    TraceMismatch { trace: f64 },

    #[error("decomposition inequality violated: slack {slack:.3e}")]
    DecompositionViolated { slack: f64 },

    #[error("integration unstable: trace drift {drift:.3e}")]
    IntegrationUnstable { drift: f64 },

    #[error("basis tag '{tag}': {reason}")]
    BadBasisTag { tag: String, reason: String },
}

impl Error {
    /// Failures of the numerical machinery itself rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure | Error::IntegrationUnstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

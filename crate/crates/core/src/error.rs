use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("first basis element is not the identity")]
    MissingUnit,

    #[error("basis is linearly dependent (smallest Gram eigenvalue {min_eigenvalue:.3e})")]
    DependentBasis { min_eigenvalue: f64 },

    #[error("matrix is not in the operator system (residual {residual:.3e})")]
    NotInSystem { residual: f64 },

    #[error("operands belong to different operator systems")]
    SystemMismatch,

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Choi matrix is not unital (deviation {deviation:.3e})")]
    NotUnital { deviation: f64 },

    #[error("unitality normalizer is singular (min eigenvalue {min_eigenvalue:.3e})")]
    SingularNormalizer { min_eigenvalue: f64 },

    #[error("functional does not vanish on the unit (|f(1)| = {value:.3e})")]
    NotReduced { value: f64 },

    #[error("functional is not self-adjoint (asymmetry {asymmetry:.3e})")]
    NotSelfAdjoint { asymmetry: f64 },

    #[error("no decomposition into matrix states found (residual {residual:.3e})")]
    NoDecompositionFound { residual: f64 },

    #[error("seminorm is degenerate: null space larger than the scalars ({0})")]
    DegenerateSeminorm(String),

    #[error("problem too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid length function: {0}")]
    InvalidLength(String),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("matrix is not an isometry (deviation {deviation:.3e})")]
    NotIsometry { deviation: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid ground metric: {0}")]
    InvalidMetric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

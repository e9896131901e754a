use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("subspaces or operators live in different inner-product spaces")]
    SpaceMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("gram matrix is not Hermitian positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("rank decision violates dim(M)+dim(N) = dim(M+N)+dim(M∩N): {dm}+{dn} != {sum}+{int}")]
    IllConditionedRank {
        dm: usize,
        dn: usize,
        sum: usize,
        int: usize,
    },
    #[error("operator is not idempotent: ||P^2 - P|| = {0:e}")]
    NotIdempotent(f64),
    #[error("normalizing operator is singular")]
    SingularNormalizer,
    #[error("degenerate angular distance (gamma = 0)")]
    DegenerateGamma,
    #[error("negative input {name} = {value}")]
    NegativeInput { name: &'static str, value: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("operator is not elliptic: {0}")]
    NotElliptic(String),
    #[error("ODE integrator failed: {0}")]
    Integrator(String),
    #[error("parameter values must be strictly increasing")]
    NonMonotoneFamily,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

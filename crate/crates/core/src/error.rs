use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (even after a diagonal shift of {shift:e})")]
    NotPositiveDefinite { shift: f64 },
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {what}")]
    NonFiniteInput { what: &'static str },
    #[error("varpi = {varpi} does not dominate the spectral norm {norm}")]
    NotDominating { varpi: f64, norm: f64 },
    #[error("mu = {0} is outside (0, 1]")]
    InvalidMu(f64),
    #[error("alpha = {0} is outside [0.5, 1)")]
    InvalidAlpha(f64),
    #[error("threshold tau = {0} must be positive")]
    InvalidTau(f64),
    #[error("kappa = {0} must be positive")]
    InvalidKappa(f64),
    #[error("step size lambda = {lambda} must lie in (0, {upper})")]
    InvalidLambda { lambda: f64, upper: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("prox slices do not partition a vector of length {dim}")]
    SliceMismatch { dim: usize },
    #[error("iterate left the finite range at step {step}")]
    NonFinite { step: usize },
    #[error("sparsity {pct}% of D = {dim} gives {count} nonzeros; need 1..=D")]
    InvalidSparsity { pct: f64, dim: usize, count: i64 },
    #[error("AR(1) coefficient {0} must satisfy |delta| < 1")]
    InvalidDelta(f64),
    #[error("reference vector has zero norm")]
    ZeroTruth,
}

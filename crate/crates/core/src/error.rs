use thiserror::Error;

/// Errors produced by the measure, bound, lattice and torus routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("exponent {exponent} exceeds the supported maximum {max}")]
    ExponentTooLarge { exponent: i128, max: u64 },
    #[error("dense degree {degree} exceeds the cap {cap}")]
    DegreeCapExceeded { degree: u64, cap: u64 },
    #[error("root polishing stalled: worst relative residual {residual:e}")]
    ConvergenceFailure { residual: f64 },
    #[error("quadrature did not converge: grid {grid}, last difference {difference:e}")]
    NonConvergence { grid: u64, difference: f64 },
    #[error("binomial coefficient overflow for N = {0}")]
    Overflow(u64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("direction is not numerically injective on the support: {left:?} and {right:?} tie")]
    TieDetected { left: Vec<i64>, right: Vec<i64> },
    #[error("zero lattice vector")]
    ZeroVector,
    #[error("no orthogonal vector with norm up to the shell cap {cap}")]
    ShellCapExceeded { cap: u64 },
    #[error("no q up to {limit} met the approximation bound (best q = {best_q}, quality {best_quality:e})")]
    NotFound {
        limit: u64,
        best_q: u64,
        best_quality: f64,
    },
    #[error("support specializes with colliding exponent {exponent}")]
    ExponentCollision { exponent: i128 },
    #[error("grid {grid} is too coarse, need at least {required} per axis")]
    GridTooCoarse { grid: usize, required: usize },
    #[error("direct torus quadrature supports at most 3 variables, got {0}")]
    DimensionTooLarge(usize),
    #[error("invalid direction vector: {0}")]
    InvalidDirection(String),
    #[error("invalid lattice point: {0}")]
    InvalidLatticePoint(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

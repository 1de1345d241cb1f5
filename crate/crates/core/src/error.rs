use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction vector must have unit Euclidean norm (got {norm})")]
    NonUnitVector { norm: f64 },

    #[error("basis construction failed after {attempts} attempts; best conditioning achieved: {best_cond:.3e} (floor {floor:.3e})")]
    BasisConditioning {
        attempts: usize,
        best_cond: f64,
        floor: f64,
    },

    #[error("shape mismatch: projection has (p={proj_p}, m={proj_m}) but basis has (p={basis_p}, m={basis_m})")]
    ShapeMismatch {
        proj_p: usize,
        proj_m: usize,
        basis_p: usize,
        basis_m: usize,
    },

    #[error("component index {index} out of range 1..={p}")]
    ComponentOutOfRange { index: usize, p: usize },

    #[error("quadrature error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureTolerance { estimate: f64, tolerance: f64 },

    #[error("Hermite rank undetermined: no coefficient above {tol:.3e} up to order {max_order}")]
    RankUndetermined { max_order: usize, tol: f64 },

    #[error("operation not supported for this function-class kind: {kind}")]
    UnsupportedClassKind { kind: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("covariance not positive semidefinite: min eigenvalue {min_eigenvalue:.6e} below threshold {threshold:.6e}")]
    CovarianceNotPsd {
        min_eigenvalue: f64,
        threshold: f64,
    },

    #[error("circulant embedding clipped relative mass {mass:.3e} above ceiling {ceiling:.3e} after {doublings} doublings; increase the embedding size")]
    ClippedMassExceeded {
        mass: f64,
        ceiling: f64,
        doublings: usize,
    },

    #[error("outside the mD < 1 regime: m = {m}, D = {d}")]
    RegimeViolation { m: usize, d: f64 },

    #[error("class Hermite rank {class_rank} does not match configured m = {config_m}")]
    RankMismatch { class_rank: usize, config_m: usize },

    #[error("projection order {proj_m} does not match requested order {m}")]
    OrderMismatch { proj_m: usize, m: usize },

    #[error("empty function-class grid")]
    EmptyGrid,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ill-formed entropy samples: {0}")]
    EntropySamples(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

/// Errors produced by circuit parsing, model construction, and analysis.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("n must be even (got {0} gates)")]
    OddGateCount(usize),
    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),
    #[error("interpolation parameter s = {0} outside [0, 1]")]
    SOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("register state is not normalized (|norm - 1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("state vector is zero")]
    ZeroVector,
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension {dim} exceeds desk-scale cap {cap}")]
    DeskScaleExceeded { dim: usize, cap: usize },
    #[error("zero-space dimension {found} does not match register dimension {expected}")]
    ZeroSpaceDimension { found: usize, expected: usize },
    #[error("spectrum asymmetric about zero: gap above {above:.6e}, gap below {below:.6e}")]
    SpectrumAsymmetry { above: f64, below: f64 },
    #[error("gap fit needs at least 3 chain lengths, got {0}")]
    DegenerateFit(usize),
    #[error("sweep needs {needed} steps, over the cap of {cap}")]
    StepBudgetExceeded { needed: usize, cap: usize },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = SegalError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegalError {
    #[error("invalid frequency spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("metric is not positive definite: {0}")]
    Metric(String),

    #[error("symplectic form is degenerate (condition number {condition:.3e})")]
    DegenerateForm { condition: f64 },

    #[error("complex unit is not naturally complex: ||J^2 + I||_F = {residual:.3e}")]
    NotNaturallyComplex { residual: f64 },

    #[error("structure not supported: {0}")]
    Unsupported(String),

    #[error("index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("inconsistent structure: {0}")]
    Inconsistent(String),

    #[error("constraint space is empty for the given generator")]
    EmptySolutionSpace,

    #[error("uniqueness scan failed: {0}")]
    ScanFailure(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("Fock space of dimension {dimension} exceeds the memory budget of {budget_bytes} bytes")]
    Resource { dimension: u128, budget_bytes: u128 },
}

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit/dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("{what} exceeds cap ({have} > {cap})")]
    CapExceeded {
        what: &'static str,
        have: u64,
        cap: u64,
    },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("matrix is singular or nearly singular (|eigenvalue| {0:.3e})")]
    Singular(f64),

    #[error("required metadata missing: {0}")]
    MissingMetadata(&'static str),

    #[error("operator has zero weight; nothing to sample")]
    ZeroOperator,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("repeated or out-of-range qubit index in gate")]
    BadGate,

    #[error("hard regime per the problem catalog: {row}")]
    HardRegime { row: String },

    #[error("error budget infeasible: {0}")]
    BudgetInfeasible(String),

    #[error("denominator estimate minus its half width is not positive; refusing normalized ratio")]
    DenominatorNotPositive,

    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

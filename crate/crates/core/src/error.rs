use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("enumeration box must have positive extents, got component {component} = {value}")]
    InvalidBox { component: usize, value: i64 },

    #[error("degree bound too small in variable {variable}: polynomial has degree {degree}, bound is {bound}")]
    DegreeExceedsBound {
        variable: usize,
        degree: i64,
        bound: i64,
    },

    #[error("coefficient index outside the degree box")]
    IndexOutsideBox,

    #[error("duplicate coefficient index")]
    DuplicateIndex,

    #[error("point lies outside the open unit polydisk")]
    OutsideDomain,

    #[error("polynomial vanishes at the evaluation point")]
    Vanishing,

    #[error("polynomial is not stable on the closed polydisk (margin {margin:e})")]
    Unstable { margin: f64 },

    #[error("grid size {grid} is invalid: {reason}")]
    InvalidGrid { grid: usize, reason: &'static str },

    #[error("moment range does not cover the requested difference")]
    OutOfRange,

    #[error("Cholesky factorization failed on a {size}x{size} Gram matrix")]
    CholeskyFailure { size: usize },

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("duplicate index in Gram index list")]
    DuplicateGramIndex,

    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenvalue computation did not converge")]
    EigenFailure,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

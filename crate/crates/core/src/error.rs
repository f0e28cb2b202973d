use thiserror::Error;

use crate::num::Complex;

/// Errors raised by the library. Each variant names the failed condition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not expandable at origin: {0}")]
    NotExpandable(String),

    #[error("branch at origin")]
    BranchAtOrigin,

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("combination outside admissible class: {0}")]
    InadmissibleCombination(String),

    #[error("index below row start: n = {n}, need n >= {min}")]
    IndexBelowRowStart { n: usize, min: usize },

    #[error("invalid multi-index: {0}")]
    InvalidMultiIndex(String),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("raise precision: root iteration did not converge after {iterations} steps at {precision} bits")]
    RaisePrecision {
        iterations: usize,
        precision: u32,
        best: Vec<Complex>,
    },

    #[error("window too short: {got} points, need {need}")]
    WindowTooShort { got: usize, need: usize },

    #[error("difference identity violated at n = {n}: residual {residual:e} exceeds {tolerance:e}")]
    DifferenceIdentityViolated {
        n: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("component index {index} out of range for a system of {d} components")]
    ComponentOutOfRange { index: usize, d: usize },

    #[error("uniqueness hypothesis unmet: {non_unique} of {total} rows have a kernel of dimension > 1")]
    UniquenessUnmet { non_unique: usize, total: usize },

    #[error("ordering ambiguous: {0}")]
    OrderingAmbiguous(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::expr::{EvalError, OrderOverflow, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    OrderOverflow(#[from] OrderOverflow),
    #[error("`{expr}` may only depend on {allowed}")]
    VariableOutOfScope { expr: String, allowed: &'static str },
    #[error("sampling exhausted: no admissible point for sample {index} after {attempts} attempts")]
    SamplingExhausted { index: usize, attempts: usize },
    #[error("singularity on path at t = {t}: {source}")]
    SingularityOnPath { t: f64, source: EvalError },
    #[error("trajectory gives x({t}) = {actual}, expected {expected}")]
    EndpointMismatch { t: f64, expected: f64, actual: f64 },
    #[error("pole of a_o*t + v_o at t = {t} inside [{lo}, {hi}]")]
    Pole { t: f64, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

use thiserror::Error;

use crate::expr::{EvalError, ParseError};
use crate::jets::JetError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("degenerate metric at {point:?} (scaled determinant {scaled_det:e})")]
    DegenerateMetric { point: Vec<f64>, scaled_det: f64 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("connection has torsion {residual:e} at {point:?}")]
    Torsionful { point: Vec<f64>, residual: f64 },
    #[error("could not draw a nondegenerate sample point after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
    #[error("manifold file: {0}")]
    ManifoldFile(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("unknown catalog structure `{0}`")]
    UnknownStructure(String),
}

impl Error {
    /// Attaches the evaluation point to a jet-level failure.
    pub fn from_jet(err: JetError, point: &[f64]) -> Error {
        match err {
            JetError::Singular { scaled_det } => Error::DegenerateMetric {
                point: point.to_vec(),
                scaled_det,
            },
            JetError::NotSquare { rows, cols } => Error::InvalidInput(format!("{rows}x{cols} matrix is not square")),
            JetError::Eval(e) => Error::Eval(e),
        }
    }
}

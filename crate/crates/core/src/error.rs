use thiserror::Error;

use crate::complex::SimplexId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed simplex {vertices:?}: {reason}")]
    MalformedSimplex { vertices: Vec<usize>, reason: String },
    #[error("unknown simplex {0:?}")]
    UnknownSimplex(Vec<usize>),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("vector assignment: {0}")]
    Assignment(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("set is not locally closed: {x:?} <= {y:?} <= {z:?} with the middle simplex missing")]
    NotConvex { x: SimplexId, y: SimplexId, z: SimplexId },
    #[error("simplex {0:?} is not covered by any variable set to one")]
    Coverage(SimplexId),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

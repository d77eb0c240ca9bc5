use thiserror::Error;

use crate::function_model::TailBounds;
use crate::real::Real;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {x} lies outside the domain [{a}, {b}]")]
    OutOfDomain { x: Real, a: Real, b: Real },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "piece {piece} oscillates infinitely often near {point}; \
         truncate the domain at some x_min > {point} (default {hint})"
    )]
    InfiniteSegmentation {
        piece: usize,
        point: Real,
        hint: Real,
    },

    #[error("model is discontinuous at {at}")]
    Discontinuous { at: Real },

    #[error("unresolved oscillation: the variation is at least {lower_bound}")]
    UnresolvedOscillation {
        lower_bound: Real,
        tail: Box<TailBounds>,
    },

    #[error("function is not of bounded variation (variation >= {lower_bound})")]
    NotBv { lower_bound: Real },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("certificate failure in {context}: {lhs} {relation} {rhs} does not hold")]
    CertificateFailure {
        context: String,
        lhs: Real,
        relation: String,
        rhs: Real,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

use crate::deform::ObstructionClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("not in GL(V): matrix is singular")]
    NotInvertible,

    #[error("wrong degree: expected {expected}, got {got}")]
    WrongDegree { expected: String, got: usize },

    #[error("invalid multi-index: {0}")]
    InvalidIndex(String),

    #[error("metric is not symmetric positive definite: {0}")]
    InvalidMetric(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("numerical rank unstable under cutoff variation (ranks {ranks:?} at cutoffs {cutoffs:?})")]
    RankUnstable { ranks: [usize; 3], cutoffs: [f64; 3] },

    #[error("support cap {cap} exceeded at frequency {freq} during {context}")]
    SupportCap { cap: i32, freq: String, context: String },

    #[error("payload layout mismatch: {0}")]
    Layout(String),

    #[error("model is not elliptic: # Laplacian on E^{degree} is singular at mode {mode}")]
    NotElliptic { degree: usize, mode: String },

    #[error("coefficients leave E^{degree} (relative projection residual {residual:e})")]
    NotInSubspace { degree: usize, residual: f64 },

    #[error("deformation obstructed at order {}: harmonic residue {:e}", .0.order, .0.relative_residue)]
    Obstructed(Box<ObstructionClass>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

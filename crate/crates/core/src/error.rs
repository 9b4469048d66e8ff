use thiserror::Error;

use crate::rhaly::OpNormEstimate;

/// Errors surfaced by the laboratory. Variants are grouped by the module that
/// raises them; `code()` gives the module-qualified identifier used in reports.
#[derive(Debug, Error)]
pub enum Error {
    // coeffcore
    #[error("coefficient sequence must have at least one entry")]
    EmptySeries,
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
    #[error("angular grid of {points} points is below the oversampling floor {required}")]
    OversamplingViolation { points: usize, required: usize },
    #[error("slice bounds out of order: {start} > {end}")]
    IndexOrder { start: usize, end: usize },
    #[error("block index must be at least 1")]
    BlockIndex,

    // norms
    #[error("radius {0} outside the admissible range")]
    RadiusRange(f64),
    #[error("exponent p = {0} must be at least 1")]
    ExponentRange(f64),
    #[error("weight exponent alpha = {0} must exceed -1")]
    AlphaRange(f64),
    #[error("mixed-norm parameters require q <= p (got q = {q}, p = {p})")]
    ParamOrder { q: f64, p: f64 },
    #[error("radial grid built for weight exponent {grid} but {wanted} was requested")]
    GridMismatch { grid: f64, wanted: f64 },
    #[error("smoothness index {0} outside (0, 1]")]
    SmoothnessRange(f64),

    // lipschitz
    #[error("degree {degree} too small for a profile with K = {k} (needs {required})")]
    DegreeTooSmall { degree: usize, k: u32, required: usize },

    // rhalyop
    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("input degree {degree} exceeds the sequence truncation {truncation}")]
    TruncationMismatch { degree: usize, truncation: usize },
    #[error("power iteration did not converge; best lower bound {}", .0.lower)]
    NoConvergence(Box<OpNormEstimate>),

    // constructions
    #[error("truncation {truncation} too small for N = {n} (needs at least {required})")]
    TruncationTooSmall {
        n: usize,
        truncation: usize,
        required: usize,
    },
    #[error("profile expects {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("polygonal knots invalid: {0}")]
    InvalidKnots(String),
    #[error("block {k}: no sign vector reached the Khinchine threshold {threshold}")]
    BlockBudgetExhausted { k: u32, threshold: f64 },
    #[error("parameter out of range: {0}")]
    Parameter(String),

    // classifier
    #[error("p = {0} outside the range covered by this verdict")]
    PRange(f64),
    #[error("sequence is not certified monotone")]
    NotMonotone,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySeries => "coeffcore.empty",
            Error::NonFinite { .. } => "coeffcore.non_finite",
            Error::OversamplingViolation { .. } => "coeffcore.oversampling",
            Error::IndexOrder { .. } => "coeffcore.index_order",
            Error::BlockIndex => "coeffcore.block_index",
            Error::RadiusRange(_) => "norms.radius_range",
            Error::ExponentRange(_) => "norms.exponent_range",
            Error::AlphaRange(_) => "norms.alpha_range",
            Error::ParamOrder { .. } => "norms.param_order",
            Error::GridMismatch { .. } => "norms.grid_mismatch",
            Error::SmoothnessRange(_) => "norms.smoothness_range",
            Error::DegreeTooSmall { .. } => "lipschitz.degree_too_small",
            Error::InvalidSpec(_) => "rhalyop.invalid_spec",
            Error::InvalidMeasure(_) => "rhalyop.invalid_measure",
            Error::TruncationMismatch { .. } => "rhalyop.truncation_mismatch",
            Error::NoConvergence(_) => "rhalyop.no_convergence",
            Error::TruncationTooSmall { .. } => "constructions.truncation_too_small",
            Error::ShapeMismatch { .. } => "constructions.shape_mismatch",
            Error::InvalidKnots(_) => "constructions.invalid_knots",
            Error::BlockBudgetExhausted { .. } => "constructions.block_budget_exhausted",
            Error::Parameter(_) => "constructions.parameter",
            Error::PRange(_) => "classifier.p_range",
            Error::NotMonotone => "classifier.not_monotone",
        }
    }

    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence(_) | Error::BlockBudgetExhausted { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::ExponentRange(p))
    }
}

use thiserror::Error;

/// Errors raised by body algebra, measures, projective maps and the drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("direction vector must be nonzero and finite")]
    InvalidDirection,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation not supported for this pair of representations: {0}")]
    UnsupportedOperandPair(String),
    #[error("scale factor must be nonzero")]
    DegenerateScale,
    #[error("origin is not interior to the body (margin {margin:e})")]
    OriginNotInterior { margin: f64 },
    #[error("degenerate body: {0}")]
    DegenerateBody(String),
    #[error("dimension {0} is not supported by this operation")]
    DimensionUnsupported(usize),
    #[error("expected {expected} operands, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("point or body outside the domain of the projective map: {0}")]
    DomainViolation(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("affine maps have no canonical fractional-linear form")]
    AffineMapHasNoCanonicalForm,
    #[error("no witness point: the first body is contained in the second")]
    NoWitnessPoint,
    #[error("cap is degenerate: Chebyshev radius {radius:e} at cap height {height:e}")]
    CapDegenerate { radius: f64, height: f64 },
    #[error("witness search failed after {iterations} iterations (last ratio {last_ratio:e})")]
    WitnessSearchFailed { iterations: usize, last_ratio: f64 },
    #[error("ball-level guarantee holds but measured {functional} comparison failed: {value_a} vs {value_b}")]
    MeasuredComparisonFailed {
        functional: String,
        value_a: f64,
        value_b: f64,
    },
    #[error("no violation exists: the first body is contained in the second")]
    NoViolationExists,
    #[error("centrally symmetric bodies required (asymmetry {asymmetry:e})")]
    SymmetryRequired { asymmetry: f64 },
    #[error("linear program failed: {0}")]
    LinearProgram(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use crate::space::PointId;

/// Errors raised when constructing or running on structurally invalid input.
///
/// Axiom violations of a well-shaped family are not errors; they are listed in
/// a [`ValidationReport`](crate::space::ValidationReport).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("a space needs at least one point")]
    NoPoints,
    #[error("a family needs at least one pseudometric")]
    NoPseudometrics,
    #[error("table {index} has {found} entries, expected {expected} for {points} points")]
    TableShape {
        index: usize,
        points: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {0} is outside the space")]
    PointOutOfRange(PointId),
    #[error("pseudometric index {index} out of range (family has {count})")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("a compact set must be nonempty")]
    EmptySet,
    #[error("map has {found} images, space has {expected} points")]
    MapNotTotal { expected: usize, found: usize },
    #[error("exponent r must be at least 1")]
    ExponentTooSmall,
    #[error("coefficients for index {index}: b + c = {sum} is not in (0, 1)")]
    ContractionOutOfRange { index: usize, sum: f64 },
    #[error("coefficient count {found} does not match family size {expected}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("contraction constant {0} is not in (0, 1)")]
    ConstantOutOfRange(f64),
    #[error("family does not separate points {0} and {1}")]
    NotSeparating(PointId, PointId),
    #[error("max_steps must be at least 1")]
    ZeroSteps,
    #[error("invalid instance profile: {0}")]
    Profile(&'static str),
    #[error("no certified instance after {attempts} attempts")]
    GenerationFailed { attempts: u32 },
}

use thiserror::Error;

use crate::metric::MetricError;

/// Errors raised by the constructions and checks outside `metric`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("input metric is not normalized: minimum distance {0}, expected 1")]
    UnnormalizedInput(f64),
    #[error("line embedding must have minimum 0, found {0}")]
    NegativeLineValue(f64),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("layers {a} and {b} are not nested")]
    NotNested { a: usize, b: usize },
    #[error("curves {a} and {b} intersect")]
    CurvesIntersect { a: usize, b: usize },
    #[error("curves {a} and {b} are closer than the grid resolution allows")]
    ResolutionTooCoarse { a: usize, b: usize },
    #[error("containment is not a total order: {0}")]
    NotTotallyOrdered(String),
    #[error("curve fits inside a single grid cell")]
    DegenerateCurve,
    #[error("instance has {0} semantics, expected the other kind")]
    WrongSemantics(&'static str),
    #[error("bad triple {0:?}")]
    BadTriple([usize; 3]),
    #[error("loci cannot be separated by {0}")]
    LociTooCrowded(f64),
    #[error("ordering is inconsistent with triple {0:?}")]
    InconsistentOrdering([usize; 3]),
    #[error("n must be at least {min}, got {got}")]
    TooSmall { min: usize, got: usize },
    #[error("parameter out of range: {0}")]
    ParameterRangeViolation(String),
    #[error("no gap of absent strip pairs found")]
    NoGapFound,
    #[error("embedding covers {got} points, space has {expected}")]
    IncompleteEmbedding { expected: usize, got: usize },
    #[error("bad size: {0}")]
    BadSize(String),
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("unknown kind {0:?}")]
    UnknownKind(String),
    #[error("target dimension {d} exceeds ambient dimension {ambient}")]
    DimensionExceedsAmbient { d: usize, ambient: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

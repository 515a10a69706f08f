use thiserror::Error;

/// Errors shared across the crate. Exact arithmetic never fails silently:
/// every contract violation surfaces as one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("gram form is degenerate (determinant 0)")]
    DegenerateGram,

    #[error("gram form is not symmetric")]
    AsymmetricGram,

    #[error("unknown gram preset `{0}`")]
    UnknownPreset(String),

    #[error("non-unit class: degree-0 part is zero")]
    NonUnitClass,

    #[error("no rational square root: {0}")]
    NoRationalSquareRoot(String),

    #[error("invalid rational literal `{0}`")]
    BadRational(String),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("matrix is not an isometry of the Mukai pairing")]
    NotIsometry,

    #[error("isometry does not respect the twisted period planes")]
    NotHodge,

    #[error("orientation-reversing isometry: not factorizable")]
    OrientationReversing,

    #[error("cannot build generator: {0}")]
    Generator(String),

    #[error("generator word does not chain: {0}")]
    ChainMismatch(String),

    #[error("chamber descent exceeded the cap of {cap} reflections (trace: {applied} applied)")]
    DescentCap { cap: usize, applied: usize },

    #[error("image of (1,0,0) is not of exponential form: {0}")]
    NotExpForm(String),

    #[error("terminal predicate failed: {0}")]
    Predicate(String),

    #[error("matrix entries are not integral: {0}")]
    NotIntegral(String),

    #[error("internal contradiction in input data: {0}")]
    Internal(String),
}

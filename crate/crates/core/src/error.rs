use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },

    #[error("interior product of a 0-form is undefined")]
    ContractZeroForm,

    #[error("form of degree {degree} evaluated on {given} vectors")]
    ArityMismatch { degree: usize, given: usize },

    #[error("index {0} out of range 1..=7")]
    IndexOutOfRange(u8),

    #[error("index tuple is not strictly increasing: {0:?}")]
    UnsortedIndices(Vec<u8>),

    #[error("non-finite vector component")]
    NonFinite,

    #[error("degenerate frame (gram determinant {gram_det:e})")]
    DegenerateFrame { gram_det: f64 },

    #[error("frame of length {0} not supported here")]
    FrameShape(usize),

    #[error("frame is not orthonormal (max gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("triple is not Harvey-Lawson (phi = {0})")]
    NotHarveyLawson(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("period must be positive, got {0}")]
    InvalidPeriod(f64),

    #[error("form uses axis 7, reserved for the circle factor")]
    TouchesCircleAxis,

    #[error("unknown immersion spec `{0}`")]
    UnknownSpec(String),

    #[error("resolution {0} below minimum of 8")]
    ResolutionTooSmall(usize),

    #[error("field is not normal (tangential residual {0:e})")]
    NonNormalField(f64),

    #[error("t ladder invalid: {0}")]
    InvalidLadder(String),

    #[error("parse error: {0}")]
    Parse(String),
}

use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state is not normalized: |amp0|^2 + |amp1|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| entry = {deviation}")]
    NotUnitary { deviation: f64 },

    #[error("non-finite input: {0}")]
    NonFiniteInput(&'static str),

    #[error("basis states are not orthogonal: |<state0|state1>| = {overlap}")]
    DegenerateBasis { overlap: f64 },

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("bit {index} has value {value}; bits must be 0 or 1")]
    InvalidBit { index: usize, value: u8 },

    #[error("invalid frame layout: {0}")]
    InvalidFrameSpec(String),

    #[error("stage order violation on bit {bit_index}: expected stage {expected}, got {found}")]
    StageOrderViolation {
        bit_index: usize,
        expected: u8,
        found: u8,
    },

    #[error("party role mismatch: operation requires {expected:?}")]
    WrongRole { expected: crate::protocol::Role },

    #[error("secret transforms do not commute: commutator norm {norm}")]
    NonCommutingTransforms { norm: f64 },

    #[error("observation for bit {0} has no matching truth bit")]
    MisalignedIndices(usize),

    #[error("contingency table is empty")]
    EmptyCounts,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by approximation, sampling, and parsing.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: bounds must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite function value at {location}")]
    NonFinite { location: String },

    #[error("coefficient tail did not decay below tolerance at the {max_points}-point grid cap; the function may be non-smooth or under-resolved")]
    Unresolved { max_points: usize },

    #[error("density is negative at x = {x} (value {value:e})")]
    NegativeDensity { x: f64, value: f64 },

    #[error("density mass {mass:e} is numerically zero")]
    ZeroMass { mass: f64 },

    #[error("cross approximation rank exceeded the cap of {cap}")]
    RankOverflow { cap: usize },

    #[error("conditional slice at x = {x} has numerically zero mass")]
    ZeroSlice { x: f64 },

    #[error("too many consecutive degenerate conditional slices while sampling")]
    DegenerateConditional,

    #[error("hat height {hat:e} lies below the density value {value:e} at {location}")]
    HatViolation { hat: f64, value: f64, location: String },

    #[error("rejection sampler exceeded {0} proposals without collecting the requested sample count")]
    Runaway(u64),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("{0}")]
    EmptyInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

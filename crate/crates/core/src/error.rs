use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value {what} at {location}")]
    NonFinite { what: &'static str, location: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("boundary amplitude {amplitude:e} exceeds tolerance {tolerance:e} (box too small)")]
    BoundaryMass { amplitude: f64, tolerance: f64 },

    #[error("spectral tail mass {tail:e} exceeds tolerance {tolerance:e} (grid too coarse)")]
    Aliasing { tail: f64, tolerance: f64 },

    #[error("phase grid momentum {momentum} outside resolvable band ±{band}")]
    BandViolation { momentum: f64, band: f64 },

    #[error("phase grid position nodes are not aligned with the spatial grid")]
    Misaligned,

    #[error("negative weight {0} in atomic measure")]
    NegativeWeight(f64),

    #[error("weights sum to {0}, expected 1")]
    Unnormalized(f64),

    #[error("atom ({0}) lies outside the compact set")]
    AtomOutsideSet(String),

    #[error("nonpositive denominator {0} in delta threshold (inconsistent C_obs and C_geo)")]
    NonpositiveDenominator(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

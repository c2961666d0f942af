use thiserror::Error;

use crate::geometry::Vec2;

/// Errors raised anywhere in the localization pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("field {h_sq:.3e} µT² is below the noise floor {floor_sq:.3e} µT² (sensor out of range)")]
    OutOfRange { h_sq: f64, floor_sq: f64 },

    #[error("trajectory leaves the interaction area at t={t:.3} s, position ({:.3}, {:.3}) cm: {reason}", position.x, position.y)]
    TrajectoryOutOfBounds { t: f64, position: Vec2, reason: String },

    #[error("timestamp {got} s precedes previous sample at {prev} s")]
    NonMonotonicTimestamp { prev: f64, got: f64 },

    #[error("{f} Hz does not fall on an exact bin of a {n}-sample window at {fs} Hz")]
    BinMisalignment { n: usize, f: f64, fs: f64 },

    #[error("buffer holds {len} of {capacity} samples")]
    BufferNotFull { len: usize, capacity: usize },

    #[error("insufficient calibration data: {0}")]
    InsufficientSamples(String),

    #[error("calibration spread {spread:.1}% exceeds {limit:.1}% (sensor moved during calibration?)", spread = spread * 100.0, limit = limit * 100.0)]
    ExcessiveSpread { spread: f64, limit: f64 },

    #[error("rig is not calibrated (k20/k30 unset)")]
    Uncalibrated,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

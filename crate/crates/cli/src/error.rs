use magloc_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("refusing to overwrite {0}; pass --force")]
    OutputExists(String),
}

impl CliError {
    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }

    /// Distinct per error kind; 0 is success and 1 is left to panics.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Config(_) => 4,
            CliError::OutputExists(_) => 5,
            CliError::Core(e) => match e {
                CoreError::InvalidConfig(_) => 4,
                CoreError::DegenerateGeometry(_) => 10,
                CoreError::Domain(_) => 11,
                CoreError::OutOfRange { .. } => 12,
                CoreError::TrajectoryOutOfBounds { .. } => 13,
                CoreError::NonMonotonicTimestamp { .. } => 14,
                CoreError::BinMisalignment { .. } => 15,
                CoreError::BufferNotFull { .. } => 16,
                CoreError::InsufficientSamples(_) => 17,
                CoreError::ExcessiveSpread { .. } => 18,
                CoreError::Uncalibrated => 19,
                CoreError::EmptyInput => 20,
            },
        }
    }
}

/// `(code, meaning)` for `--help` and the README.
pub const EXIT_CODES: &[(i32, &str)] = &[
    (0, "success"),
    (2, "usage error"),
    (3, "I/O error"),
    (4, "invalid configuration"),
    (5, "output exists (use --force)"),
    (10, "degenerate geometry"),
    (11, "domain error"),
    (12, "signal below noise floor"),
    (13, "trajectory out of bounds"),
    (14, "non-monotonic timestamp"),
    (15, "tone not on an exact DFT bin"),
    (16, "buffer not full"),
    (17, "insufficient samples"),
    (18, "calibration spread too large"),
    (19, "rig not calibrated"),
    (20, "empty input"),
];

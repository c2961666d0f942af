//! Command-line front end: configuration, file formats and the workflows.

// `!(x > 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;

pub use args::Cli;
pub use commands::run;
pub use config::AppConfig;
pub use error::{CliError, EXIT_CODES};

pub const EXIT_CODE_HELP: &str = "Exit codes: 0 success, 2 usage, 3 I/O, 4 invalid configuration, \
5 output exists, 10 degenerate geometry, 11 domain, 12 below noise floor, 13 trajectory out of bounds, \
14 non-monotonic timestamp, 15 bin misalignment, 16 buffer not full, 17 insufficient samples, \
18 calibration spread, 19 uncalibrated, 20 empty input.";

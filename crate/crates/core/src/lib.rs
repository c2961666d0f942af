//! Two-anchor AC magnetic field localization.
//!
//! Two electromagnets on a bar, driven at distinct tones, act as anchors. A
//! three-axis magnetometer on the tracked object reads both fields at once;
//! the pipeline band-passes each axis, reads the total amplitude at each tone
//! from an exact DFT bin, and runs an iterative radius/angle solve with
//! two-circle trilateration to recover the in-plane position.
//!
//! * [`field`]: point-dipole forward model and its radius inversion
//! * [`synth`]: synthetic magnetometer streams (noise, quantization, orientation)
//! * [`dsp`]: sample window, band-pass, tone readout
//! * [`solver`]: the fixed-point solve, calibration, dead-zone
//! * [`eval`]: grid and trajectory accuracy harnesses
//!
//! Units are centimeters and µT throughout; `K = m_eff²` in µT²·cm⁶.

// `!(x >= 0.0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod field;
pub mod geometry;
pub mod io;
pub mod rig;
pub mod solver;
pub mod synth;
pub mod tracker;

pub use capacity::capacity;
pub use dsp::{bin_amplitude, extract_h, Conditioner, FilterSpec, SampleBuffer, SpectralAmplitudes};
pub use error::{Error, Result};
pub use eval::{
    error_stats, run_grid_eval, run_trajectory_eval, EvalOptions, EvalReport, GridSpec, SourceSetup, TrajectoryReport,
};
pub use field::{dipole_field_at, field_magnitude_sq, invert_radius, DipoleSource};
pub use geometry::{Rotation3, Vec2, Vec3};
pub use rig::RigConfig;
pub use solver::{
    apply_deadzone, calibrate, circle_intersect, locate, update_cos2, CalibrationResult, PositionEstimate, Quality,
    SolverState,
};
pub use synth::{
    quantize, synthesize, trajectory_position, NoiseModel, Preset, SensorPose, SensorSample, Trajectory, TrajectorySpec,
};
pub use tracker::Tracker;

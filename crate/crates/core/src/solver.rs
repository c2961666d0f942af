//! Joint (r, θ) estimation per anchor and two-circle trilateration.
//!
//! Each iteration inverts the scalar field law for both radii using the
//! current angle guesses, intersects the two circles in the `y >= 0`
//! half-plane, and recomputes the angles from the new position. Angles are
//! carried as `cos²θ` (the only form the field law needs), which stays
//! well defined on the baseline where `arctan(x / y)` would divide by zero.

use crate::dsp::{Conditioner, FilterSpec, SpectralAmplitudes};
use crate::error::{Error, Result};
use crate::field::invert_radius;
use crate::geometry::Vec2;
use crate::rig::RigConfig;
use crate::synth::SensorSample;

/// Iteration cap for warm-started solves.
pub const DEFAULT_MAX_ITERATIONS: usize = 5;
/// Iteration cap for the first solve of a track, before any angle estimate exists.
pub const DEFAULT_INITIAL_MAX_ITERATIONS: usize = 200;
/// Early-exit threshold on successive position iterates, cm.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// Largest relative spread of per-window K estimates accepted during calibration.
pub const MAX_CALIBRATION_SPREAD: f64 = 0.20;
/// Minimum calibration capture, seconds.
pub const MIN_CALIBRATION_SECONDS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quality {
    Ok,
    /// The circles did not meet; `y` was clamped to 0.
    ClampedInfeasible,
    /// A tone fell below the noise floor; the position was not updated.
    OutOfRange,
    /// An anchor distance fell below `min_valid_distance`, where the point-dipole model is unreliable.
    NearField,
}

impl Quality {
    pub fn as_str(self) -> &'static str {
        match self {
            Quality::Ok => "ok",
            Quality::ClampedInfeasible => "clamped_infeasible",
            Quality::OutOfRange => "out_of_range",
            Quality::NearField => "near_field",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(Quality::Ok),
            "clamped_infeasible" => Some(Quality::ClampedInfeasible),
            "out_of_range" => Some(Quality::OutOfRange),
            "near_field" => Some(Quality::NearField),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    /// After the dead-zone.
    pub position: Vec2,
    pub r20: f64,
    pub r30: f64,
    pub cos2_20: f64,
    pub cos2_30: f64,
    pub iterations: usize,
    /// Successive iterates came within tolerance before the cap.
    pub converged: bool,
    pub quality: Quality,
}

/// Per-sensor solver memory: warm-start angles and dead-zone output.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub warm_cos2_20: f64,
    pub warm_cos2_30: f64,
    pub last_output: Option<Vec2>,
    /// cm; 0 disables.
    pub deadzone_radius: f64,
    pub max_iterations: usize,
    pub initial_max_iterations: usize,
    pub tolerance: f64,
    warm: bool,
}

impl Default for SolverState {
    fn default() -> Self {
        Self {
            warm_cos2_20: 1.0,
            warm_cos2_30: 1.0,
            last_output: None,
            deadzone_radius: 0.0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            initial_max_iterations: DEFAULT_INITIAL_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
            warm: false,
        }
    }
}

impl SolverState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_deadzone(radius: f64) -> Self {
        Self {
            deadzone_radius: radius,
            ..Self::default()
        }
    }

    /// True once a solve has produced angle estimates to start from.
    pub fn is_warm(&self) -> bool {
        self.warm
    }

    /// Forget the angle estimates (θ = 0) but keep settings and dead-zone memory.
    pub fn make_cold(&mut self) {
        self.warm_cos2_20 = 1.0;
        self.warm_cos2_30 = 1.0;
        self.warm = false;
    }
}

/// Intersects circles of radius `r20` about the origin and `r30` about `(d, 0)`,
/// keeping the `y >= 0` solution. Returns the point and whether the circles meet;
/// when they do not, `y` is clamped to 0.
pub fn circle_intersect(r20: f64, r30: f64, d: f64) -> (Vec2, bool) {
    let x = (r20 * r20 - r30 * r30 + d * d) / (2.0 * d);
    let y_sq = r20 * r20 - x * x;
    // tolerate rounding at exact tangency
    if y_sq >= -1e-12 * r20 * r20 {
        (Vec2::new(x, y_sq.max(0.0).sqrt()), true)
    } else {
        (Vec2::new(x, 0.0), false)
    }
}

/// `cos²θ` to each anchor for a dipole axis along +y:
/// `y²/(x² + y²)` and `y²/((d − x)² + y²)`.
pub fn update_cos2(x: f64, y: f64, d: f64) -> Result<(f64, f64)> {
    let y2 = y * y;
    let n20 = x * x + y2;
    let n30 = (d - x) * (d - x) + y2;
    if n20 == 0.0 || n30 == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "position ({x}, {y}) coincides with an anchor center"
        )));
    }
    Ok((y2 / n20, y2 / n30))
}

/// Suppresses moves shorter than the dead-zone radius.
pub fn apply_deadzone(state: &mut SolverState, new_pos: Vec2) -> Vec2 {
    match state.last_output {
        Some(last) if state.deadzone_radius > 0.0 && new_pos.distance(last) < state.deadzone_radius => last,
        _ => {
            state.last_output = Some(new_pos);
            new_pos
        }
    }
}

/// Runs the fixed-point loop for one pair of tone amplitudes.
pub fn locate(h: SpectralAmplitudes, rig: &RigConfig, state: &mut SolverState) -> Result<PositionEstimate> {
    let (k20, k30) = rig.ks()?;
    let d = rig.baseline_d;
    let floor = rig.noise_floor;

    if !(h.h20 > floor && h.h30 > floor) {
        return Ok(PositionEstimate {
            position: state.last_output.unwrap_or(Vec2::new(d / 2.0, 0.0)),
            r20: f64::NAN,
            r30: f64::NAN,
            cos2_20: state.warm_cos2_20,
            cos2_30: state.warm_cos2_30,
            iterations: 0,
            converged: false,
            quality: Quality::OutOfRange,
        });
    }

    let floor_sq = floor * floor;
    let (h20_sq, h30_sq) = (h.h20 * h.h20, h.h30 * h.h30);
    let cap = if state.warm {
        state.max_iterations
    } else {
        state.initial_max_iterations
    }
    .max(1);

    let (mut c20, mut c30) = (state.warm_cos2_20, state.warm_cos2_30);
    let mut prev: Option<Vec2> = None;
    let mut out = None;
    for it in 1..=cap {
        let r20 = invert_radius(k20, c20, h20_sq, floor_sq)?;
        let r30 = invert_radius(k30, c30, h30_sq, floor_sq)?;
        let (p, feasible) = circle_intersect(r20, r30, d);
        (c20, c30) = update_cos2(p.x, p.y, d)?;
        let converged = prev.is_some_and(|q| p.distance(q) < state.tolerance);
        out = Some((p, feasible, r20, r30, it, converged));
        if converged {
            break;
        }
        prev = Some(p);
    }
    let (p, feasible, r20, r30, iterations, converged) = out.expect("cap >= 1");

    let quality = if r20 < rig.min_valid_distance || r30 < rig.min_valid_distance {
        Quality::NearField
    } else if feasible {
        Quality::Ok
    } else {
        Quality::ClampedInfeasible
    };

    state.warm_cos2_20 = c20;
    state.warm_cos2_30 = c30;
    state.warm = true;
    let position = apply_deadzone(state, p);

    Ok(PositionEstimate {
        position,
        r20,
        r30,
        cos2_20: c20,
        cos2_30: c30,
        iterations,
        converged,
        quality,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationResult {
    pub k20: f64,
    pub k30: f64,
    pub samples_used: usize,
    pub windows: usize,
    /// Largest relative standard deviation of per-window K across the two anchors.
    pub residual_spread: f64,
}

impl CalibrationResult {
    pub fn apply_to(&self, rig: &mut RigConfig) {
        rig.k20 = Some(self.k20);
        rig.k30 = Some(self.k30);
    }
}

/// Estimates K per anchor from a capture at the calibration point `(D/2, 0)`,
/// where `r = D/2` and `cos²θ = 0` for both anchors, so `K = h̄² · (D/2)⁶`.
pub fn calibrate(samples: &[SensorSample], rig: &RigConfig, filter: &FilterSpec) -> Result<CalibrationResult> {
    rig.validate()?;
    let needed = (MIN_CALIBRATION_SECONDS * rig.sample_rate).ceil() as usize;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples(format!(
            "{} samples, need at least {needed} ({MIN_CALIBRATION_SECONDS} s)",
            samples.len()
        )));
    }

    let mut cond = Conditioner::new(rig, filter)?;
    let mut hs = Vec::new();
    for s in samples {
        cond.push(*s)?;
        if cond.is_ready() {
            hs.push(cond.amplitudes()?);
        }
    }
    let usable: Vec<_> = hs
        .iter()
        .filter(|h| h.h20 > rig.noise_floor && h.h30 > rig.noise_floor)
        .collect();
    if usable.is_empty() {
        return Err(Error::InsufficientSamples(
            "no window carries tone energy above the noise floor".into(),
        ));
    }

    let r6 = (rig.baseline_d / 2.0).powi(6);
    let n = usable.len() as f64;
    let stats = |pick: fn(&SpectralAmplitudes) -> f64| {
        let mean_h = usable.iter().map(|h| pick(h)).sum::<f64>() / n;
        let ks: Vec<f64> = usable.iter().map(|h| pick(h).powi(2) * r6).collect();
        let mean_k = ks.iter().sum::<f64>() / n;
        let var = ks.iter().map(|k| (k - mean_k).powi(2)).sum::<f64>() / n;
        (mean_h * mean_h * r6, var.sqrt() / mean_k)
    };
    let (k20, s20) = stats(|h| h.h20);
    let (k30, s30) = stats(|h| h.h30);
    let spread = s20.max(s30);
    if usable.len() < hs.len() / 2 || spread > MAX_CALIBRATION_SPREAD {
        return Err(Error::ExcessiveSpread {
            spread: if usable.len() < hs.len() / 2 {
                f64::INFINITY
            } else {
                spread
            },
            limit: MAX_CALIBRATION_SPREAD,
        });
    }
    Ok(CalibrationResult {
        k20,
        k30,
        samples_used: samples.len(),
        windows: usable.len(),
        residual_spread: spread,
    })
}

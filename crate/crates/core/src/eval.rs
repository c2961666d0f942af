//! Simulated accuracy evaluation: static grid dwell and continuous trajectories.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dsp::FilterSpec;
use crate::error::{Error, Result};
use crate::geometry::{Rotation3, Vec2};
use crate::rig::RigConfig;
use crate::solver::{calibrate, CalibrationResult, Quality, SolverState};
use crate::synth::{check_in_area, synthesize, NoiseModel, TrajectorySpec};
use crate::tracker::Tracker;

/// Rectangular evaluation grid. Row 0 is nearest the anchor bar.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Lower-left corner, cm.
    pub origin: Vec2,
    pub width: f64,
    pub height: f64,
    pub rows: usize,
    pub cols: usize,
}

impl GridSpec {
    /// 10 × 10 cm, 5 × 5 points, centered on the baseline and starting 0.75 cm off the bar.
    pub fn default_for(rig: &RigConfig) -> Self {
        Self {
            origin: Vec2::new((rig.baseline_d - 10.0) / 2.0, 0.75),
            width: 10.0,
            height: 10.0,
            rows: 5,
            cols: 5,
        }
    }

    pub fn validate(&self, rig: &RigConfig) -> Result<()> {
        if self.rows < 2 || self.cols < 2 {
            return Err(Error::InvalidConfig("grid needs at least 2 rows and 2 columns".into()));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::InvalidConfig("grid width and height must be > 0".into()));
        }
        for (_, _, p) in self.points() {
            check_in_area(rig, 0.0, p)?;
        }
        Ok(())
    }

    /// `(row, col, position)`, row-major from the bar outward.
    pub fn points(&self) -> Vec<(usize, usize, Vec2)> {
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let x = self.origin.x + self.width * c as f64 / (self.cols - 1) as f64;
                let y = self.origin.y + self.height * r as f64 / (self.rows - 1) as f64;
                out.push((r, c, Vec2::new(x, y)));
            }
        }
        out
    }
}

/// The simulated anchors and sensor mounting.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSetup {
    /// µT·cm³
    pub m_eff20: f64,
    pub m_eff30: f64,
    pub phase20: f64,
    pub phase30: f64,
    /// Fixed sensor orientation; ignored when `random_orientation` is set.
    pub rotation: Rotation3,
    /// Draw a fresh orientation per grid point / trajectory from the seed.
    pub random_orientation: bool,
}

impl Default for SourceSetup {
    fn default() -> Self {
        Self {
            m_eff20: 3000.0,
            m_eff30: 3000.0,
            phase20: 0.0,
            phase30: std::f64::consts::FRAC_PI_3,
            rotation: Rotation3::IDENTITY,
            random_orientation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    /// Windows averaged per grid point.
    pub trials_per_point: usize,
    /// Samples between averaged windows.
    pub window_stride: usize,
    /// Windows discarded after the buffer first fills.
    pub settle_windows: usize,
    /// Capture length for auto-calibration, s.
    pub calibration_seconds: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            trials_per_point: 10,
            window_stride: 10,
            settle_windows: 50,
            calibration_seconds: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub row: usize,
    pub col: usize,
    pub truth: Vec2,
    /// Mean over non-flagged windows; NaN when every window was flagged.
    pub mean_estimate: Vec2,
    /// Euclidean distance from the mean estimate to the truth, cm.
    pub error: f64,
    pub windows: usize,
    /// Windows reported out of range.
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub points: Vec<PointResult>,
    pub mae_mean: f64,
    pub mae_std: f64,
    pub seed: u64,
    pub noise: NoiseModel,
    /// Rig as used, including the K values the run calibrated.
    pub rig: RigConfig,
    pub calibration: Option<CalibrationResult>,
}

impl EvalReport {
    /// Mean error per grid row, nearest row first.
    pub fn row_means(&self) -> Vec<f64> {
        let rows = self.points.iter().map(|p| p.row).max().map_or(0, |r| r + 1);
        (0..rows)
            .map(|r| {
                let e: Vec<f64> = self
                    .points
                    .iter()
                    .filter(|p| p.row == r && p.error.is_finite())
                    .map(|p| p.error)
                    .collect();
                e.iter().sum::<f64>() / e.len() as f64
            })
            .collect()
    }

    pub fn flagged_points(&self) -> usize {
        self.points.iter().filter(|p| !p.error.is_finite()).count()
    }

    /// One row per grid point, then a `#` summary footer.
    pub fn write_csv(&self, w: &mut impl Write, label: &str) -> io::Result<()> {
        writeln!(w, "row,col,truth_x,truth_y,est_x,est_y,error_cm,windows,flagged")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{:.4},{:.4},{:.6},{:.6},{:.6},{},{}",
                p.row, p.col, p.truth.x, p.truth.y, p.mean_estimate.x, p.mean_estimate.y, p.error, p.windows, p.flagged
            )?;
        }
        writeln!(w, "# material,mean_error_cm,std_cm,points")?;
        writeln!(
            w,
            "# {label},{:.4},{:.4},{}",
            self.mae_mean,
            self.mae_std,
            self.points.len()
        )?;
        let rows: Vec<String> = self.row_means().iter().map(|e| format!("{e:.4}")).collect();
        writeln!(w, "# row_mean_error_cm={}", rows.join(";"))?;
        if let Some(c) = &self.calibration {
            writeln!(
                w,
                "# calibration k20={:.6e} k30={:.6e} spread={:.4}",
                c.k20, c.k30, c.residual_spread
            )?;
        }
        Ok(())
    }

    /// Whitespace-separated `truth_x truth_y est_x est_y`, for scatter plotting.
    pub fn write_scatter(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# truth_x truth_y est_x est_y")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.4} {:.4} {:.6} {:.6}",
                p.truth.x, p.truth.y, p.mean_estimate.x, p.mean_estimate.y
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    pub std: f64,
    pub per_point: Vec<f64>,
}

/// Euclidean errors with population mean and standard deviation.
pub fn error_stats(pairs: &[(Vec2, Vec2)]) -> Result<ErrorStats> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let per_point: Vec<f64> = pairs.iter().map(|(t, e)| t.distance(*e)).collect();
    let n = per_point.len() as f64;
    let mean = per_point.iter().sum::<f64>() / n;
    let var = per_point.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    Ok(ErrorStats {
        mean,
        std: var.sqrt(),
        per_point,
    })
}

/// SplitMix64 step, used to derive independent per-task seeds.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const CALIBRATION_STREAM: u64 = u64::MAX;

/// The sensor orientation a run with this setup and seed uses.
pub fn sensor_rotation(setup: &SourceSetup, seed: u64) -> Rotation3 {
    if !setup.random_orientation {
        return setup.rotation;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // uniform on SO(3) via a normalized Gaussian quaternion
    let g = rand_distr::StandardNormal;
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample::<f64, _>(g));
    Rotation3::from_quaternion(q[0], q[1], q[2], q[3])
}

/// Returns `rig` unchanged if calibrated; otherwise runs a synthetic
/// calibration capture at `(D/2, 0)` and stores the recovered K values.
pub fn ensure_calibrated(
    rig: &RigConfig,
    filter: &FilterSpec,
    setup: &SourceSetup,
    noise: &NoiseModel,
    seconds: f64,
    seed: u64,
) -> Result<(RigConfig, Option<CalibrationResult>)> {
    if rig.is_calibrated() {
        return Ok((rig.clone(), None));
    }
    let cal_seed = derive_seed(seed, CALIBRATION_STREAM);
    let sources = rig.sources(setup.m_eff20, setup.m_eff30, setup.phase20, setup.phase30)?;
    let traj = TrajectorySpec::fixed(Vec2::new(rig.baseline_d / 2.0, 0.0), seconds)?;
    let noise = NoiseModel {
        rng_seed: cal_seed,
        ..noise.clone()
    };
    let samples = synthesize(rig, &sources, &traj, &sensor_rotation(setup, cal_seed), &noise, seconds)?;
    let cal = calibrate(&samples, rig, filter)?;
    let mut out = rig.clone();
    cal.apply_to(&mut out);
    Ok((out, Some(cal)))
}

/// Static-dwell accuracy over every grid point.
pub fn run_grid_eval(
    rig: &RigConfig,
    filter: &FilterSpec,
    setup: &SourceSetup,
    grid: &GridSpec,
    noise: &NoiseModel,
    opts: &EvalOptions,
    seed: u64,
) -> Result<EvalReport> {
    rig.validate()?;
    grid.validate(rig)?;
    if opts.trials_per_point == 0 || opts.window_stride == 0 {
        return Err(Error::InvalidConfig(
            "trials_per_point and window_stride must be > 0".into(),
        ));
    }
    let (rig, calibration) = ensure_calibrated(rig, filter, setup, noise, opts.calibration_seconds, seed)?;
    let sources = rig.sources(setup.m_eff20, setup.m_eff30, setup.phase20, setup.phase30)?;

    let windows = opts.settle_windows + (opts.trials_per_point - 1) * opts.window_stride + 1;
    let n_samples = rig.buffer_len - 1 + windows;
    let duration = n_samples as f64 / rig.sample_rate;

    let points = grid
        .points()
        .into_par_iter()
        .enumerate()
        .map(|(i, (row, col, truth))| -> Result<PointResult> {
            let point_seed = derive_seed(seed, i as u64);
            let traj = TrajectorySpec::fixed(truth, duration)?;
            let noise = NoiseModel {
                rng_seed: point_seed,
                ..noise.clone()
            };
            let samples = synthesize(
                &rig,
                &sources,
                &traj,
                &sensor_rotation(setup, point_seed),
                &noise,
                duration,
            )?;
            let mut tracker = Tracker::new(&rig, filter, SolverState::new())?;
            let (mut sum, mut used, mut flagged, mut w) = (Vec2::ZERO, 0usize, 0usize, 0usize);
            for s in samples {
                let Some(est) = tracker.step(s)? else { continue };
                let k = w;
                w += 1;
                if k < opts.settle_windows || !(k - opts.settle_windows).is_multiple_of(opts.window_stride) {
                    continue;
                }
                if est.quality == Quality::OutOfRange {
                    flagged += 1;
                } else {
                    sum = sum + est.position;
                    used += 1;
                }
            }
            let mean_estimate = if used > 0 {
                sum * (1.0 / used as f64)
            } else {
                Vec2::new(f64::NAN, f64::NAN)
            };
            Ok(PointResult {
                row,
                col,
                truth,
                mean_estimate,
                error: mean_estimate.distance(truth),
                windows: used + flagged,
                flagged,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let pairs: Vec<(Vec2, Vec2)> = points
        .iter()
        .filter(|p| p.error.is_finite())
        .map(|p| (p.truth, p.mean_estimate))
        .collect();
    let stats = error_stats(&pairs)?;
    Ok(EvalReport {
        points,
        mae_mean: stats.mean,
        mae_std: stats.std,
        seed,
        noise: noise.clone(),
        rig,
        calibration,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    /// Time of the newest sample in the window, s.
    pub t: f64,
    pub truth: Vec2,
    pub estimate: Vec2,
    pub error: f64,
    pub quality: Quality,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport {
    pub series: Vec<TrackPoint>,
    pub mean_error: f64,
    pub max_error: f64,
    /// Estimates per second of stream time.
    pub update_rate_hz: f64,
    pub rig: RigConfig,
}

/// Replays a trajectory sample by sample and scores each estimate against
/// the true position at the window's newest sample.
pub fn run_trajectory_eval(
    rig: &RigConfig,
    filter: &FilterSpec,
    setup: &SourceSetup,
    traj: &TrajectorySpec,
    noise: &NoiseModel,
    opts: &EvalOptions,
    seed: u64,
) -> Result<TrajectoryReport> {
    rig.validate()?;
    let (rig, _) = ensure_calibrated(rig, filter, setup, noise, opts.calibration_seconds, seed)?;
    let sources = rig.sources(setup.m_eff20, setup.m_eff30, setup.phase20, setup.phase30)?;
    let stream_seed = derive_seed(seed, 0);
    let noise = NoiseModel {
        rng_seed: stream_seed,
        ..noise.clone()
    };
    let samples = synthesize(
        &rig,
        &sources,
        traj,
        &sensor_rotation(setup, stream_seed),
        &noise,
        traj.duration,
    )?;
    let mut tracker = Tracker::new(&rig, filter, SolverState::new())?;
    let mut series = Vec::new();
    for s in samples {
        if let Some(e) = tracker.step(s)? {
            let truth = traj.position(s.t.min(traj.duration))?;
            series.push(TrackPoint {
                t: s.t,
                truth,
                estimate: e.position,
                error: e.position.distance(truth),
                quality: e.quality,
            });
        }
    }
    let scored: Vec<f64> = series
        .iter()
        .filter(|p| p.quality != Quality::OutOfRange)
        .map(|p| p.error)
        .collect();
    if scored.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean_error = scored.iter().sum::<f64>() / scored.len() as f64;
    let max_error = scored.iter().copied().fold(0.0, f64::max);
    let span = series.last().map_or(0.0, |p| p.t) - series.first().map_or(0.0, |p| p.t);
    let update_rate_hz = if span > 0.0 {
        (series.len() - 1) as f64 / span
    } else {
        0.0
    };
    Ok(TrajectoryReport {
        series,
        mean_error,
        max_error,
        update_rate_hz,
        rig,
    })
}

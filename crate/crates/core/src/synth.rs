//! Synthetic magnetometer streams from the two AC-driven anchors.
//!
//! Each sample is `R · Σᵢ field_i(p(t))·sin(2π fᵢ t + φᵢ) + bias + noise`,
//! quantized per axis. Output is a pure function of the inputs and the seed.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::field::{dipole_field_at, DipoleSource};
use crate::geometry::{Rotation3, Vec2, Vec3};
use crate::rig::RigConfig;

/// One timestamped three-axis reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSample {
    /// Seconds.
    pub t: f64,
    /// µT, sensor body frame.
    pub field: Vec3,
}

impl SensorSample {
    pub const fn new(t: f64, field: Vec3) -> Self {
        Self { t, field }
    }
}

/// Sensor imperfections applied on top of the ideal field.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    /// Per-axis white Gaussian noise, µT.
    pub gaussian_sigma: f64,
    /// Quantizer step, µT. 0 disables quantization.
    pub quantization_step: f64,
    /// Static background (Earth) field in the sensor frame, µT.
    pub dc_bias: Vec3,
    pub rng_seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            gaussian_sigma: 0.1,
            quantization_step: 0.6,
            dc_bias: Vec3::new(20.0, -5.0, 43.0),
            rng_seed: 0,
        }
    }
}

/// Named noise configurations. The three surfaces share the same physics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Noiseless,
    Metal,
    Wood,
    Acrylic,
}

impl Preset {
    pub const SURFACES: [Preset; 3] = [Preset::Metal, Preset::Wood, Preset::Acrylic];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Noiseless => "noiseless",
            Preset::Metal => "metal",
            Preset::Wood => "wood",
            Preset::Acrylic => "acrylic",
        }
    }

    pub fn parse(s: &str) -> Option<Preset> {
        match s.to_ascii_lowercase().as_str() {
            "noiseless" => Some(Preset::Noiseless),
            "metal" => Some(Preset::Metal),
            "wood" => Some(Preset::Wood),
            "acrylic" => Some(Preset::Acrylic),
            _ => None,
        }
    }

    pub fn noise_model(self, seed: u64) -> NoiseModel {
        match self {
            Preset::Noiseless => NoiseModel {
                gaussian_sigma: 0.0,
                quantization_step: 0.0,
                rng_seed: seed,
                ..NoiseModel::default()
            },
            Preset::Metal | Preset::Wood | Preset::Acrylic => NoiseModel {
                rng_seed: seed,
                ..NoiseModel::default()
            },
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gaussian_sigma must be >= 0, got {}",
                self.gaussian_sigma
            )));
        }
        if !(self.quantization_step >= 0.0 && self.quantization_step.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "quantization_step must be >= 0, got {}",
                self.quantization_step
            )));
        }
        if !self.dc_bias.is_finite() {
            return Err(Error::InvalidConfig("dc_bias must be finite".into()));
        }
        Ok(())
    }
}

/// Where the sensor is and how it is turned relative to the rig.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorPose {
    pub position: Vec2,
    pub rotation: Rotation3,
}

/// Sensor motion over time.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Static(Vec2),
    Linear {
        start: Vec2,
        end: Vec2,
    },
    Circular {
        center: Vec2,
        radius: f64,
        /// rad/s
        angular_rate: f64,
        phase0: f64,
    },
    /// `(t, position)` pairs with strictly increasing `t`, interpolated piecewise-linearly.
    Waypoints(Vec<(f64, Vec2)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySpec {
    pub kind: Trajectory,
    /// Seconds.
    pub duration: f64,
}

impl TrajectorySpec {
    pub fn new(kind: Trajectory, duration: f64) -> Result<Self> {
        let spec = Self { kind, duration };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fixed(at: Vec2, duration: f64) -> Result<Self> {
        Self::new(Trajectory::Static(at), duration)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Domain(format!(
                "trajectory duration must be > 0, got {}",
                self.duration
            )));
        }
        match &self.kind {
            Trajectory::Circular { radius, .. } if !(*radius >= 0.0) => {
                Err(Error::Domain("circle radius must be >= 0".into()))
            }
            Trajectory::Waypoints(w) => {
                if w.is_empty() {
                    return Err(Error::Domain("waypoint list is empty".into()));
                }
                if w.windows(2).any(|p| !(p[1].0 > p[0].0)) {
                    return Err(Error::Domain("waypoint times must strictly increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Position at time `t ∈ [0, duration]`.
    pub fn position(&self, t: f64) -> Result<Vec2> {
        trajectory_position(self, t)
    }
}

pub fn trajectory_position(spec: &TrajectorySpec, t: f64) -> Result<Vec2> {
    if !(0.0..=spec.duration).contains(&t) {
        return Err(Error::Domain(format!("t={t} outside [0, {}]", spec.duration)));
    }
    Ok(match &spec.kind {
        Trajectory::Static(p) => *p,
        Trajectory::Linear { start, end } => {
            let a = t / spec.duration;
            *start + (*end - *start) * a
        }
        Trajectory::Circular {
            center,
            radius,
            angular_rate,
            phase0,
        } => {
            let (s, c) = (angular_rate * t + phase0).sin_cos();
            *center + Vec2::new(c, s) * *radius
        }
        Trajectory::Waypoints(w) => {
            let i = w.partition_point(|(wt, _)| *wt <= t);
            if i == 0 {
                w[0].1
            } else if i == w.len() {
                w[w.len() - 1].1
            } else {
                let (t0, p0) = w[i - 1];
                let (t1, p1) = w[i];
                p0 + (p1 - p0) * ((t - t0) / (t1 - t0))
            }
        }
    })
}

/// Round `v` to the nearest multiple of `step`, ties away from zero. `step = 0` is identity.
pub fn quantize(v: f64, step: f64) -> f64 {
    if step == 0.0 {
        v
    } else {
        step * (v / step).round()
    }
}

/// Checks a point against the interaction area: the tracked half-plane and
/// the minimum distance to both anchors.
pub fn check_in_area(rig: &RigConfig, t: f64, p: Vec2) -> Result<()> {
    let out = |reason: String| Err(Error::TrajectoryOutOfBounds { t, position: p, reason });
    if !p.is_finite() {
        return out("non-finite position".into());
    }
    if p.y < 0.0 {
        return out("behind the anchor bar (y < 0)".into());
    }
    for (name, a) in [("20 Hz", rig.anchor20()), ("30 Hz", rig.anchor30())] {
        let d = p.distance(a);
        if d < rig.min_valid_distance {
            return out(format!(
                "{d:.3} cm from the {name} anchor, minimum is {} cm",
                rig.min_valid_distance
            ));
        }
    }
    Ok(())
}

/// Generates `round(duration · sample_rate)` samples at `t = i / sample_rate`.
pub fn synthesize(
    rig: &RigConfig,
    sources: &[DipoleSource; 2],
    trajectory: &TrajectorySpec,
    rotation: &Rotation3,
    noise: &NoiseModel,
    duration: f64,
) -> Result<Vec<SensorSample>> {
    rig.validate()?;
    noise.validate()?;
    trajectory.validate()?;
    for s in sources {
        s.validate()?;
    }
    if sources[0].frequency != rig.f20 || sources[1].frequency != rig.f30 {
        return Err(Error::Domain(format!(
            "source frequencies ({}, {}) Hz do not match rig ({}, {}) Hz",
            sources[0].frequency, sources[1].frequency, rig.f20, rig.f30
        )));
    }
    if !rotation.is_orthonormal(1e-9) {
        return Err(Error::Domain("sensor rotation is not orthonormal".into()));
    }
    if !(duration >= 0.0 && duration <= trajectory.duration + 1e-12) {
        return Err(Error::Domain(format!(
            "duration {duration} s exceeds trajectory duration {} s",
            trajectory.duration
        )));
    }

    let n = (duration * rig.sample_rate).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
    let gauss = (noise.gaussian_sigma > 0.0).then(|| Normal::new(0.0, noise.gaussian_sigma).expect("sigma validated"));

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / rig.sample_rate;
        let p = trajectory.position(t.min(trajectory.duration))?;
        check_in_area(rig, t, p)?;
        let mut planar = Vec2::ZERO;
        for src in sources {
            let amp = dipole_field_at(src, p)?;
            planar = planar + amp * (TAU * src.frequency * t + src.phase).sin();
        }
        let mut field = rotation.apply(planar.extend()) + noise.dc_bias;
        if let Some(g) = &gauss {
            field = field + Vec3::new(g.sample(&mut rng), g.sample(&mut rng), g.sample(&mut rng));
        }
        let field = field.map(|v| quantize(v, noise.quantization_step));
        out.push(SensorSample::new(t, field));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> NoiseModel {
        NoiseModel {
            gaussian_sigma: 0.0,
            quantization_step: 0.0,
            dc_bias: Vec3::ZERO,
            rng_seed: 0,
        }
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(1.0, 0.6), 1.2);
        assert_eq!(quantize(0.29, 0.6), 0.0);
        assert_eq!(quantize(-3.27, 0.0), -3.27);
        assert_eq!(quantize(0.3, 0.6), 0.6);
        assert_eq!(quantize(-0.3, 0.6), -0.6);
    }

    #[test]
    fn trajectory_examples() {
        let lin = TrajectorySpec::new(
            Trajectory::Linear {
                start: Vec2::new(0.0, 5.0),
                end: Vec2::new(10.0, 5.0),
            },
            10.0,
        )
        .unwrap();
        assert_eq!(lin.position(5.0).unwrap(), Vec2::new(5.0, 5.0));

        let circ = TrajectorySpec::new(
            Trajectory::Circular {
                center: Vec2::new(5.0, 8.0),
                radius: 2.0,
                angular_rate: 1.3,
                phase0: 0.0,
            },
            4.0,
        )
        .unwrap();
        assert_eq!(circ.position(0.0).unwrap(), Vec2::new(7.0, 8.0));

        let fixed = TrajectorySpec::fixed(Vec2::new(3.0, 4.0), 2.0).unwrap();
        for t in [0.0, 0.7, 2.0] {
            assert_eq!(fixed.position(t).unwrap(), Vec2::new(3.0, 4.0));
        }
        assert!(matches!(fixed.position(2.5), Err(Error::Domain(_))));
        assert!(matches!(fixed.position(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn waypoints_interpolate_and_hold_ends() {
        let w = TrajectorySpec::new(
            Trajectory::Waypoints(vec![
                (0.5, Vec2::new(0.0, 4.0)),
                (1.5, Vec2::new(2.0, 6.0)),
                (2.5, Vec2::new(2.0, 10.0)),
            ]),
            3.0,
        )
        .unwrap();
        assert_eq!(w.position(0.0).unwrap(), Vec2::new(0.0, 4.0));
        assert_eq!(w.position(1.0).unwrap(), Vec2::new(1.0, 5.0));
        assert_eq!(w.position(2.0).unwrap(), Vec2::new(2.0, 8.0));
        assert_eq!(w.position(3.0).unwrap(), Vec2::new(2.0, 10.0));
        assert!(TrajectorySpec::new(Trajectory::Waypoints(vec![(1.0, Vec2::ZERO), (1.0, Vec2::ZERO)]), 2.0).is_err());
    }

    #[test]
    fn single_source_on_axis_is_pure_tone() {
        let rig = RigConfig::default();
        let mut sources = rig.sources(1.0, 1.0, 0.0, 0.0).unwrap();
        // park the second source far away with a negligible moment
        sources[1].m_eff = 1e-300;
        let traj = TrajectorySpec::fixed(Vec2::new(0.0, 1.0), 1.0).unwrap();
        let s = synthesize(&rig, &sources, &traj, &Rotation3::IDENTITY, &quiet(), 1.0).unwrap();
        assert_eq!(s.len(), 100);
        for smp in &s {
            let expect = 2.0 * (TAU * 20.0 * smp.t).sin();
            assert!(smp.field.x.abs() < 1e-12);
            assert!((smp.field.y - expect).abs() < 1e-12);
            assert_eq!(smp.field.z, 0.0);
        }
    }

    #[test]
    fn sample_count_and_spacing() {
        let rig = RigConfig::default();
        let sources = rig.sources(100.0, 100.0, 0.0, 1.0).unwrap();
        let traj = TrajectorySpec::fixed(Vec2::new(5.0, 5.0), 10.0).unwrap();
        let s = synthesize(
            &rig,
            &sources,
            &traj,
            &Rotation3::IDENTITY,
            &NoiseModel::default(),
            10.0,
        )
        .unwrap();
        assert_eq!(s.len(), 1000);
        for w in s.windows(2) {
            assert!((w[1].t - w[0].t - 0.01).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let rig = RigConfig::default();
        let sources = rig.sources(100.0, 120.0, 0.0, 1.0).unwrap();
        let traj = TrajectorySpec::fixed(Vec2::new(5.0, 5.0), 2.0).unwrap();
        let n = NoiseModel {
            rng_seed: 42,
            ..NoiseModel::default()
        };
        let a = synthesize(&rig, &sources, &traj, &Rotation3::IDENTITY, &n, 2.0).unwrap();
        let b = synthesize(&rig, &sources, &traj, &Rotation3::IDENTITY, &n, 2.0).unwrap();
        assert_eq!(a, b);
        let other = NoiseModel { rng_seed: 43, ..n };
        let c = synthesize(&rig, &sources, &traj, &Rotation3::IDENTITY, &other, 2.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn out_of_area_is_rejected() {
        let rig = RigConfig::default();
        let sources = rig.sources(100.0, 100.0, 0.0, 0.0).unwrap();
        let near = TrajectorySpec::fixed(Vec2::new(0.1, 0.1), 1.0).unwrap();
        let err = synthesize(&rig, &sources, &near, &Rotation3::IDENTITY, &quiet(), 1.0).unwrap_err();
        assert!(matches!(err, Error::TrajectoryOutOfBounds { .. }));
        let behind = TrajectorySpec::fixed(Vec2::new(5.0, -2.0), 1.0).unwrap();
        let err = synthesize(&rig, &sources, &behind, &Rotation3::IDENTITY, &quiet(), 1.0).unwrap_err();
        assert!(matches!(err, Error::TrajectoryOutOfBounds { .. }));
    }

    #[test]
    fn frequency_mismatch_is_rejected() {
        let rig = RigConfig::default();
        let mut sources = rig.sources(100.0, 100.0, 0.0, 0.0).unwrap();
        sources[1].frequency = 25.0;
        let traj = TrajectorySpec::fixed(Vec2::new(5.0, 5.0), 1.0).unwrap();
        assert!(synthesize(&rig, &sources, &traj, &Rotation3::IDENTITY, &quiet(), 1.0).is_err());
    }

    // Oracle: a naive full-length DFT of the generated stream.
    #[test]
    fn spectrum_has_energy_only_at_tones_and_dc() {
        let rig = RigConfig::default();
        let sources = rig.sources(300.0, 200.0, 0.4, 2.0).unwrap();
        let traj = TrajectorySpec::fixed(Vec2::new(3.0, 6.0), 2.0).unwrap();
        let noise = NoiseModel {
            dc_bias: Vec3::new(20.0, -5.0, 43.0),
            ..quiet()
        };
        let rot = Rotation3::from_axis_angle(Vec3::new(1.0, 2.0, 0.5), 0.9);
        let s = synthesize(&rig, &sources, &traj, &rot, &noise, 2.0).unwrap();
        let n = s.len();
        for axis in 0..3 {
            let x: Vec<f64> = s.iter().map(|v| v.field.to_array()[axis]).collect();
            for k in 0..=n / 2 {
                let (mut re, mut im) = (0.0, 0.0);
                for (i, v) in x.iter().enumerate() {
                    let a = TAU * (k * i) as f64 / n as f64;
                    re += v * a.cos();
                    im -= v * a.sin();
                }
                let mag = re.hypot(im) / n as f64;
                let f = k as f64 * rig.sample_rate / n as f64;
                if k != 0 && f != 20.0 && f != 30.0 {
                    assert!(mag < 1e-9, "axis {axis} bin {k} ({f} Hz) has {mag}");
                }
            }
        }
    }
}

//! Fixtures shared by the benchmarks in `benches/`.

use magloc_core::{synthesize, NoiseModel, RigConfig, Rotation3, SensorSample, TrajectorySpec, Vec2};

pub const M_EFF: f64 = 3000.0;

pub fn calibrated_rig(buffer_len: usize) -> RigConfig {
    RigConfig {
        buffer_len,
        k20: Some(M_EFF * M_EFF),
        k30: Some(M_EFF * M_EFF),
        ..RigConfig::default()
    }
}

/// Default-noise stream at a fixed point.
pub fn static_stream(rig: &RigConfig, at: Vec2, seconds: f64) -> Vec<SensorSample> {
    let src = rig.sources(M_EFF, M_EFF, 0.0, 1.0).expect("valid sources");
    let traj = TrajectorySpec::fixed(at, seconds).expect("valid trajectory");
    let noise = NoiseModel {
        rng_seed: 1,
        ..NoiseModel::default()
    };
    synthesize(rig, &src, &traj, &Rotation3::IDENTITY, &noise, seconds).expect("in area")
}

use crate::dsp::{Conditioner, FilterSpec, SpectralAmplitudes};
use crate::error::Result;
use crate::rig::RigConfig;
use crate::solver::{locate, PositionEstimate, SolverState};
use crate::synth::SensorSample;

/// The full per-sample pipeline for one sensor: buffer, filter, tone readout, solve.
#[derive(Debug, Clone)]
pub struct Tracker {
    rig: RigConfig,
    cond: Conditioner,
    state: SolverState,
    last_amplitudes: Option<SpectralAmplitudes>,
}

impl Tracker {
    /// Fails with [`crate::Error::Uncalibrated`] when the rig has no K values.
    pub fn new(rig: &RigConfig, filter: &FilterSpec, state: SolverState) -> Result<Self> {
        rig.ks()?;
        Ok(Self {
            rig: rig.clone(),
            cond: Conditioner::new(rig, filter)?,
            state,
            last_amplitudes: None,
        })
    }

    /// Feeds one sample; returns an estimate once the window is full.
    pub fn step(&mut self, sample: SensorSample) -> Result<Option<PositionEstimate>> {
        self.cond.push(sample)?;
        if !self.cond.is_ready() {
            return Ok(None);
        }
        let h = self.cond.amplitudes()?;
        self.last_amplitudes = Some(h);
        locate(h, &self.rig, &mut self.state).map(Some)
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn last_amplitudes(&self) -> Option<SpectralAmplitudes> {
        self.last_amplitudes
    }

    pub fn rig(&self) -> &RigConfig {
        &self.rig
    }
}

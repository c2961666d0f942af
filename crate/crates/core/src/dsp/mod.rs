//! Streaming signal conditioning: sample window, per-axis band-pass, and
//! two-bin tone readout.

mod buffer;
mod filter;
mod tone;

pub use buffer::SampleBuffer;
pub use filter::{bandpass_step, BandpassState, Biquad, FilterSpec};
pub use tone::{bin_amplitude, extract_h, SpectralAmplitudes};

use crate::error::Result;
use crate::geometry::Vec3;
use crate::rig::RigConfig;
use crate::synth::SensorSample;

/// Residual start-up transient tolerated after priming, relative to the input.
const PRIME_TOLERANCE: f64 = 1e-12;

/// Raw samples in, band-passed window out.
///
/// The filter runs continuously across windows. When the raw window first
/// fills, each axis filter is primed by running it over that window
/// repeatedly: with both tones on exact bins the window is one period of the
/// steady-state signal, so priming reaches the state an always-running filter
/// would have and the first window carries no start-up transient.
#[derive(Debug, Clone)]
pub struct Conditioner {
    rig: RigConfig,
    spec: FilterSpec,
    raw: SampleBuffer,
    filtered: SampleBuffer,
    states: [BandpassState; 3],
    primed: bool,
}

impl Conditioner {
    pub fn new(rig: &RigConfig, spec: &FilterSpec) -> Result<Self> {
        rig.validate()?;
        Ok(Self {
            rig: rig.clone(),
            spec: spec.clone(),
            raw: SampleBuffer::new(rig.buffer_len),
            filtered: SampleBuffer::new(rig.buffer_len),
            states: std::array::from_fn(|_| BandpassState::new(spec)),
            primed: false,
        })
    }

    pub fn push(&mut self, s: SensorSample) -> Result<()> {
        self.raw.push(s)?;
        if self.primed {
            let y = self.filter_one(s.field);
            self.filtered.push(SensorSample::new(s.t, y))?;
        } else if self.raw.is_full() {
            self.prime()?;
        }
        Ok(())
    }

    fn filter_one(&mut self, v: Vec3) -> Vec3 {
        let a = v.to_array();
        Vec3::new(
            self.states[0].step(a[0]),
            self.states[1].step(a[1]),
            self.states[2].step(a[2]),
        )
    }

    fn prime(&mut self) -> Result<()> {
        let window = self.raw.window();
        let passes = self.spec.settle_samples(PRIME_TOLERANCE).div_ceil(window.len());
        for st in &mut self.states {
            st.reset();
        }
        for _ in 0..passes {
            for s in &window {
                self.filter_one(s.field);
            }
        }
        self.filtered.clear();
        for s in &window {
            let y = self.filter_one(s.field);
            self.filtered.push(SensorSample::new(s.t, y))?;
        }
        self.primed = true;
        Ok(())
    }

    pub fn is_ready(&self) -> bool {
        self.filtered.is_full()
    }

    pub fn amplitudes(&self) -> Result<SpectralAmplitudes> {
        extract_h(&self.filtered, &self.rig, &self.spec)
    }

    pub fn raw(&self) -> &SampleBuffer {
        &self.raw
    }

    pub fn filtered(&self) -> &SampleBuffer {
        &self.filtered
    }

    pub fn filter_spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn reset(&mut self) {
        self.raw.clear();
        self.filtered.clear();
        for st in &mut self.states {
            st.reset();
        }
        self.primed = false;
    }
}

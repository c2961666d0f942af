//! Exact-bin tone amplitude readout (Goertzel).

use std::f64::consts::TAU;

use crate::dsp::buffer::SampleBuffer;
use crate::dsp::filter::FilterSpec;
use crate::error::{Error, Result};
use crate::rig::{exact_bin, RigConfig};

/// Total field amplitude at each drive tone, summed in quadrature over the three axes (µT).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralAmplitudes {
    pub h20: f64,
    pub h30: f64,
}

/// `2·|X_k| / N` for the exact bin `k = N·f/fs` of a rectangular window.
pub fn bin_amplitude(window: &[f64], f: f64, fs: f64) -> Result<f64> {
    bin_amplitude_iter(window.iter().copied(), f, fs)
}

pub(crate) fn bin_amplitude_iter(window: impl ExactSizeIterator<Item = f64>, f: f64, fs: f64) -> Result<f64> {
    let n = window.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let k = exact_bin(n, f, fs).ok_or(Error::BinMisalignment { n, f, fs })?;
    if k == 0 || 2 * k >= n {
        return Err(Error::Domain(format!(
            "{f} Hz maps to bin {k} of {n}; only bins strictly between DC and Nyquist are supported"
        )));
    }
    Ok(2.0 * goertzel_power(window, k).sqrt() / n as f64)
}

/// `|X_k|²` of the whole iterator.
fn goertzel_power(window: impl ExactSizeIterator<Item = f64>, k: usize) -> f64 {
    let n = window.len();
    let coeff = 2.0 * (TAU * k as f64 / n as f64).cos();
    let (mut s1, mut s2) = (0.0, 0.0);
    for x in window {
        let s = x + coeff * s1 - s2;
        s2 = s1;
        s1 = s;
    }
    (s1 * s1 + s2 * s2 - coeff * s1 * s2).max(0.0)
}

/// Reads `h20` and `h30` from a full window of band-passed samples, dividing
/// out the filter gain at each tone.
pub fn extract_h(buf: &SampleBuffer, rig: &RigConfig, spec: &FilterSpec) -> Result<SpectralAmplitudes> {
    if !buf.is_full() {
        return Err(Error::BufferNotFull {
            len: buf.len(),
            capacity: buf.capacity(),
        });
    }
    let fs = rig.sample_rate;
    let total = |f: f64, gain: f64| -> Result<f64> {
        let mut sum = 0.0;
        for axis in 0..3 {
            let a = bin_amplitude_iter(buf.axis(axis), f, fs)? / gain;
            sum += a * a;
        }
        Ok(sum.sqrt())
    };
    Ok(SpectralAmplitudes {
        h20: total(rig.f20, spec.gain20)?,
        h30: total(rig.f30, spec.gain30)?,
    })
}

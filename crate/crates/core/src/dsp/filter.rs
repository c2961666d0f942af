//! Butterworth band-pass realized as cascaded second-order sections.
//!
//! Design: a Butterworth low-pass prototype of order `order / 2` is mapped to
//! a band-pass in the analog domain and then to z with the bilinear transform,
//! with both band edges prewarped. Every section has zeros at DC and Nyquist.
//! The overall gain is normalized to unity at the (prewarped) geometric center.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rig::RigConfig;

/// One second-order section, `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// `H(e^{jω})`.
    pub fn response(&self, omega: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        (self.b[0] + z1 * self.b[1] + z2 * self.b[2]) / (1.0 + z1 * self.a[0] + z2 * self.a[1])
    }
}

/// Band-pass design with the precomputed gains at both drive tones.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    pub low: f64,
    pub high: f64,
    pub order: usize,
    pub sample_rate: f64,
    pub sections: Vec<Biquad>,
    /// |H| at the 20 Hz tone.
    pub gain20: f64,
    /// |H| at the 30 Hz tone.
    pub gain30: f64,
    max_pole_radius: f64,
}

impl FilterSpec {
    pub const DEFAULT_PASSBAND: (f64, f64) = (15.0, 35.0);
    pub const DEFAULT_ORDER: usize = 4;

    /// Default 15–35 Hz, 4th-order design for `rig`.
    pub fn for_rig(rig: &RigConfig) -> Result<Self> {
        let (lo, hi) = Self::DEFAULT_PASSBAND;
        Self::design(lo, hi, Self::DEFAULT_ORDER, rig)
    }

    pub fn design(low: f64, high: f64, order: usize, rig: &RigConfig) -> Result<Self> {
        let fs = rig.sample_rate;
        let (fa, fb) = (rig.f20.min(rig.f30), rig.f20.max(rig.f30));
        if !(low > 0.0 && low < fa && fb < high && high < fs / 2.0) {
            return Err(Error::InvalidConfig(format!(
                "passband ({low}, {high}) Hz must satisfy 0 < low < {fa} < {fb} < high < {}",
                fs / 2.0
            )));
        }
        if order == 0 || !order.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "filter order must be a positive even integer, got {order}"
            )));
        }
        let n = order / 2;
        let w1 = (PI * low / fs).tan();
        let w2 = (PI * high / fs).tan();
        let bw = w2 - w1;
        let w0sq = w1 * w2;

        let mut poles = Vec::with_capacity(n);
        for k in 1..=n {
            let theta = PI * (2 * k + n - 1) as f64 / (2 * n) as f64;
            let p = Complex64::from_polar(1.0, theta);
            let pb = p * bw;
            let disc = (pb * pb - 4.0 * w0sq).sqrt();
            for s in [(pb + disc) * 0.5, (pb - disc) * 0.5] {
                let z = (1.0 + s) / (1.0 - s);
                if z.im > 1e-12 {
                    poles.push(z);
                } else if z.im.abs() <= 1e-12 {
                    return Err(Error::InvalidConfig(format!(
                        "passband ({low}, {high}) Hz is too wide for a second-order-section realization"
                    )));
                }
            }
        }
        debug_assert_eq!(poles.len(), n);

        let mut sections: Vec<Biquad> = poles
            .iter()
            .map(|z| Biquad {
                b: [1.0, 0.0, -1.0],
                a: [-2.0 * z.re, z.norm_sqr()],
            })
            .collect();
        let max_pole_radius = poles.iter().map(|z| z.norm()).fold(0.0, f64::max);

        let center = 2.0 * w0sq.sqrt().atan();
        let raw: f64 = sections.iter().map(|s| s.response(center).norm()).product();
        let per = raw.powf(-1.0 / n as f64);
        for s in &mut sections {
            for b in &mut s.b {
                *b *= per;
            }
        }

        let mut spec = Self {
            low,
            high,
            order,
            sample_rate: fs,
            sections,
            gain20: 0.0,
            gain30: 0.0,
            max_pole_radius,
        };
        spec.gain20 = spec.gain_at(rig.f20);
        spec.gain30 = spec.gain_at(rig.f30);
        if !(spec.gain20 > 0.0 && spec.gain30 > 0.0) {
            return Err(Error::InvalidConfig("filter gain at a drive tone is zero".into()));
        }
        Ok(spec)
    }

    pub fn response(&self, f: f64) -> Complex64 {
        let omega = 2.0 * PI * f / self.sample_rate;
        self.sections.iter().map(|s| s.response(omega)).product()
    }

    pub fn gain_at(&self, f: f64) -> f64 {
        self.response(f).norm()
    }

    pub fn max_pole_radius(&self) -> f64 {
        self.max_pole_radius
    }

    /// Samples until the slowest natural mode decays below `tol`.
    pub fn settle_samples(&self, tol: f64) -> usize {
        (tol.ln() / self.max_pole_radius.ln()).ceil().max(1.0) as usize
    }
}

/// Running state of a [`FilterSpec`] on one channel (transposed direct form II).
#[derive(Debug, Clone, PartialEq)]
pub struct BandpassState {
    sections: Vec<Biquad>,
    z: Vec<[f64; 2]>,
}

impl BandpassState {
    pub fn new(spec: &FilterSpec) -> Self {
        Self {
            sections: spec.sections.clone(),
            z: vec![[0.0; 2]; spec.sections.len()],
        }
    }

    pub fn reset(&mut self) {
        self.z.iter_mut().for_each(|z| *z = [0.0; 2]);
    }

    pub fn step(&mut self, x: f64) -> f64 {
        let mut v = x;
        for (s, z) in self.sections.iter().zip(self.z.iter_mut()) {
            let y = s.b[0] * v + z[0];
            z[0] = s.b[1] * v - s.a[0] * y + z[1];
            z[1] = s.b[2] * v - s.a[1] * y;
            v = y;
        }
        v
    }
}

/// One output sample of the band-pass; state persists across calls.
pub fn bandpass_step(state: &mut BandpassState, x: f64) -> f64 {
    state.step(x)
}

use crate::error::{Error, Result};
use crate::field::DipoleSource;
use crate::geometry::Vec2;

/// Two-anchor geometry plus signal constants.
///
/// The 20 Hz anchor sits at the origin and the 30 Hz anchor at `(baseline_d, 0)`;
/// both magnetic axes point along +y into the tracked half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct RigConfig {
    /// Distance between magnet centers, cm.
    pub baseline_d: f64,
    pub f20: f64,
    pub f30: f64,
    pub sample_rate: f64,
    /// Calibrated K per anchor, µT²·cm⁶. `None` until calibrated.
    pub k20: Option<f64>,
    pub k30: Option<f64>,
    /// Distances below this break the point-dipole approximation, cm.
    pub min_valid_distance: f64,
    /// Analysis window length in samples.
    pub buffer_len: usize,
    /// Tone amplitude below which the sensor is considered out of range, µT.
    pub noise_floor: f64,
}

impl Default for RigConfig {
    fn default() -> Self {
        Self {
            baseline_d: 10.0,
            f20: 20.0,
            f30: 30.0,
            sample_rate: 100.0,
            k20: None,
            k30: None,
            min_valid_distance: 0.5,
            buffer_len: 50,
            // ~3x the amplitude noise a 0.6 µT quantizer leaves in a 50-sample bin
            noise_floor: 0.2,
        }
    }
}

impl RigConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.baseline_d > 0.0 && self.baseline_d.is_finite()) {
            return bad(format!("baseline_d must be > 0, got {}", self.baseline_d));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return bad(format!("sample_rate must be > 0, got {}", self.sample_rate));
        }
        if self.f20 == self.f30 {
            return bad("f20 and f30 must differ".into());
        }
        let nyquist = self.sample_rate / 2.0;
        for (name, f) in [("f20", self.f20), ("f30", self.f30)] {
            if !(f > 0.0 && f < nyquist) {
                return bad(format!("{name}={f} Hz must lie in (0, {nyquist}) Hz"));
            }
            if exact_bin(self.buffer_len, f, self.sample_rate).is_none() {
                return bad(format!(
                    "{name}={f} Hz is not an exact bin of a {}-sample window at {} Hz",
                    self.buffer_len, self.sample_rate
                ));
            }
        }
        if self.buffer_len < 2 {
            return bad("buffer_len must be >= 2".into());
        }
        for (name, k) in [("k20", self.k20), ("k30", self.k30)] {
            if let Some(k) = k {
                if !(k > 0.0 && k.is_finite()) {
                    return bad(format!("{name} must be > 0, got {k}"));
                }
            }
        }
        if !(self.min_valid_distance >= 0.0) {
            return bad("min_valid_distance must be >= 0".into());
        }
        if !(self.noise_floor >= 0.0) {
            return bad("noise_floor must be >= 0".into());
        }
        Ok(())
    }

    pub fn anchor20(&self) -> Vec2 {
        Vec2::ZERO
    }

    pub fn anchor30(&self) -> Vec2 {
        Vec2::new(self.baseline_d, 0.0)
    }

    /// Calibrated constants, or [`Error::Uncalibrated`].
    pub fn ks(&self) -> Result<(f64, f64)> {
        match (self.k20, self.k30) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Uncalibrated),
        }
    }

    pub fn is_calibrated(&self) -> bool {
        self.ks().is_ok()
    }

    /// The pair of anchors with the given moments and phases, axes along +y.
    pub fn sources(&self, m_eff20: f64, m_eff30: f64, phase20: f64, phase30: f64) -> Result<[DipoleSource; 2]> {
        let axis = Vec2::new(0.0, 1.0);
        Ok([
            DipoleSource::new(self.anchor20(), axis, m_eff20, self.f20, phase20)?,
            DipoleSource::new(self.anchor30(), axis, m_eff30, self.f30, phase30)?,
        ])
    }
}

/// Bin index `n·f/fs` when it is an integer (within 1e-9), else `None`.
pub fn exact_bin(n: usize, f: f64, fs: f64) -> Option<usize> {
    let k = n as f64 * f / fs;
    let r = k.round();
    ((k - r).abs() <= 1e-9 && r >= 0.0).then_some(r as usize)
}

//! Closed-form point-dipole physics in the rig plane.
//!
//! A dipole with moment `M` produces, at distance `r` and angle `θ` from its
//! axis, a radial component `M cosθ / 2πr³` and a tangential component
//! `M sinθ / 4πr³`. Writing `m_eff = M / 4π` the squared magnitude is
//!
//! ```text
//! |H|² = m_eff² · r⁻⁶ · (3 cos²θ + 1)
//! ```
//!
//! so the calibration constant `K` used throughout the crate is `m_eff²`
//! (units µT²·cm⁶). The sensor reads `|H|²` as the sum of squared axis
//! amplitudes, which does not depend on how the sensor is oriented.

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// An AC-driven electromagnet anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleSource {
    /// Center, cm.
    pub position: Vec2,
    /// Unit magnetic axis in the rig plane.
    pub axis: Vec2,
    /// Effective moment √K, µT·cm³.
    pub m_eff: f64,
    /// Drive frequency, Hz.
    pub frequency: f64,
    /// Drive phase, radians.
    pub phase: f64,
}

impl DipoleSource {
    pub fn new(position: Vec2, axis: Vec2, m_eff: f64, frequency: f64, phase: f64) -> Result<Self> {
        let src = Self {
            position,
            axis,
            m_eff,
            frequency,
            phase,
        };
        src.validate()?;
        Ok(src)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || !self.phase.is_finite() {
            return Err(Error::Domain("dipole position and phase must be finite".into()));
        }
        if (self.axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "dipole axis must be a unit vector, |axis| = {}",
                self.axis.norm()
            )));
        }
        if !(self.m_eff > 0.0 && self.m_eff.is_finite()) {
            return Err(Error::Domain(format!("m_eff must be > 0, got {}", self.m_eff)));
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::Domain(format!("frequency must be > 0, got {}", self.frequency)));
        }
        Ok(())
    }

    /// The calibration constant this source implies, `m_eff²`.
    pub fn k(&self) -> f64 {
        self.m_eff * self.m_eff
    }
}

/// Field amplitude vector (the envelope of the AC field) produced by `src` at `sensor`:
/// `m_eff / r³ · (3(â·r̂)r̂ − â)`.
pub fn dipole_field_at(src: &DipoleSource, sensor: Vec2) -> Result<Vec2> {
    let d = sensor - src.position;
    let r = d.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::DegenerateGeometry(format!(
            "sensor ({}, {}) coincides with dipole center",
            sensor.x, sensor.y
        )));
    }
    let rhat = d * (1.0 / r);
    let cos = src.axis.dot(rhat);
    let scale = src.m_eff / (r * r * r);
    Ok((rhat * (3.0 * cos) - src.axis) * scale)
}

/// `k · r⁻⁶ · (3·cos²θ + 1)`.
pub fn field_magnitude_sq(k: f64, r: f64, cos2theta: f64) -> Result<f64> {
    check_k_cos2(k, cos2theta)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be > 0, got {r}")));
    }
    let r3 = r * r * r;
    Ok(k * (3.0 * cos2theta + 1.0) / (r3 * r3))
}

/// Inverts [`field_magnitude_sq`] for the radius: `(k·(3c+1)/h²)^(1/6)`.
///
/// `floor_sq` is the squared amplitude noise floor; readings at or below it
/// mean the sensor has left the trackable area.
pub fn invert_radius(k: f64, cos2theta: f64, h_sq: f64, floor_sq: f64) -> Result<f64> {
    check_k_cos2(k, cos2theta)?;
    if h_sq.is_nan() {
        return Err(Error::Domain("field magnitude is NaN".into()));
    }
    if h_sq <= floor_sq.max(0.0) {
        return Err(Error::OutOfRange { h_sq, floor_sq });
    }
    Ok((k * (3.0 * cos2theta + 1.0) / h_sq).powf(1.0 / 6.0))
}

fn check_k_cos2(k: f64, cos2theta: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("K must be > 0, got {k}")));
    }
    if !(0.0..=1.0).contains(&cos2theta) {
        return Err(Error::Domain(format!("cos²θ must lie in [0, 1], got {cos2theta}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_source(axis: Vec2) -> DipoleSource {
        DipoleSource::new(Vec2::ZERO, axis, 1.0, 20.0, 0.0).unwrap()
    }

    #[test]
    fn on_axis_field_is_twice_moment_along_axis() {
        let h = dipole_field_at(&unit_source(Vec2::new(0.0, 1.0)), Vec2::new(0.0, 1.0)).unwrap();
        assert!((h - Vec2::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn broadside_field_is_antiparallel_unit() {
        let h = dipole_field_at(&unit_source(Vec2::new(0.0, 1.0)), Vec2::new(1.0, 0.0)).unwrap();
        assert!((h - Vec2::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn radial_and_tangential_components() {
        let src = DipoleSource::new(Vec2::new(1.0, -2.0), Vec2::new(0.6, 0.8), 3.0, 20.0, 0.0).unwrap();
        let p = Vec2::new(4.0, 5.0);
        let d = p - src.position;
        let r = d.norm();
        let rhat = d * (1.0 / r);
        let that = Vec2::new(-rhat.y, rhat.x);
        let cos = src.axis.dot(rhat);
        let sin = (1.0 - cos * cos).sqrt();
        let h = dipole_field_at(&src, p).unwrap();
        assert!((h.dot(rhat) - 2.0 * src.m_eff * cos / r.powi(3)).abs() < 1e-14);
        assert!((h.dot(that).abs() - src.m_eff * sin / r.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn coincident_sensor_is_degenerate() {
        let src = unit_source(Vec2::new(0.0, 1.0));
        assert!(matches!(
            dipole_field_at(&src, Vec2::ZERO),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn rejects_non_unit_axis_and_bad_moment() {
        assert!(DipoleSource::new(Vec2::ZERO, Vec2::new(0.0, 2.0), 1.0, 20.0, 0.0).is_err());
        assert!(DipoleSource::new(Vec2::ZERO, Vec2::new(0.0, 1.0), 0.0, 20.0, 0.0).is_err());
        assert!(DipoleSource::new(Vec2::ZERO, Vec2::new(0.0, 1.0), 1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn magnitude_examples() {
        assert_eq!(field_magnitude_sq(1.0, 1.0, 1.0).unwrap(), 4.0);
        assert_eq!(field_magnitude_sq(1.0, 2.0, 0.0).unwrap(), 1.0 / 64.0);
        assert_eq!(field_magnitude_sq(64.0, 2.0, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn magnitude_domain_errors() {
        assert!(matches!(field_magnitude_sq(1.0, 0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(field_magnitude_sq(1.0, -1.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(field_magnitude_sq(1.0, 1.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(field_magnitude_sq(1.0, 1.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(field_magnitude_sq(0.0, 1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn invert_examples() {
        assert!((invert_radius(1.0, 1.0, 4.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((invert_radius(1.0, 0.0, 1.0 / 64.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn invert_below_floor_is_out_of_range() {
        assert!(matches!(
            invert_radius(1.0, 0.5, 1e-4, 1e-3),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            invert_radius(1.0, 0.5, 0.0, 0.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn decay_and_anisotropy_laws() {
        for &(k, r, c) in &[(1.0, 1.0, 0.3), (2500.0, 3.7, 0.0), (7.0, 0.4, 1.0)] {
            let a = field_magnitude_sq(k, r, c).unwrap();
            let b = field_magnitude_sq(k, 2.0 * r, c).unwrap();
            assert_eq!(b, a / 64.0);
            let axial = field_magnitude_sq(k, r, 1.0).unwrap();
            let broadside = field_magnitude_sq(k, r, 0.0).unwrap();
            assert_eq!(axial, 4.0 * broadside);
        }
    }

    proptest! {
        #[test]
        fn radius_round_trip(k in 1e-3f64..1e8, r in 0.1f64..100.0, c in 0.0f64..=1.0) {
            let h = field_magnitude_sq(k, r, c).unwrap();
            let back = invert_radius(k, c, h, 0.0).unwrap();
            prop_assert!(((back - r) / r).abs() < 1e-12);
        }

        #[test]
        fn radius_strictly_decreasing_in_field(k in 1e-2f64..1e6, c in 0.0f64..=1.0, h in 1e-6f64..1e6, f in 1.0001f64..10.0) {
            let lo = invert_radius(k, c, h, 0.0).unwrap();
            let hi = invert_radius(k, c, h * f, 0.0).unwrap();
            prop_assert!(hi < lo);
        }

        // Oracle: r and θ measured geometrically, then the scalar law evaluated directly.
        #[test]
        fn vector_matches_scalar_law(
            px in -20.0f64..20.0, py in -20.0f64..20.0,
            sx in -20.0f64..20.0, sy in -20.0f64..20.0,
            ang in 0.0f64..std::f64::consts::TAU,
            m in 0.01f64..1e4,
        ) {
            let p = Vec2::new(px, py);
            let s = Vec2::new(sx, sy);
            prop_assume!(p.distance(s) > 1e-3);
            let src = DipoleSource::new(p, Vec2::new(ang.cos(), ang.sin()), m, 20.0, 0.0).unwrap();
            let h = dipole_field_at(&src, s).unwrap();
            let d = s - p;
            let r = d.norm();
            let c = (d.dot(src.axis) / r).powi(2).min(1.0);
            let expect = field_magnitude_sq(m * m, r, c).unwrap();
            prop_assert!(((h.norm_sq() - expect) / expect).abs() < 1e-10);
        }
    }
}

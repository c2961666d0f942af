use crate::error::{Error, Result};

/// How many sensors a shared wireless link can carry:
/// `floor(throughput / (update_rate · bytes_per_update))`.
pub fn capacity(throughput: f64, update_rate: f64, bytes_per_update: f64) -> Result<u64> {
    for (name, v) in [
        ("throughput", throughput),
        ("update rate", update_rate),
        ("bytes per update", bytes_per_update),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    Ok((throughput / (update_rate * bytes_per_update)).floor() as u64)
}

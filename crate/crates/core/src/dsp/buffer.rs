use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::synth::SensorSample;

/// Fixed-capacity FIFO window of three-axis samples, stored per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    capacity: usize,
    times: VecDeque<f64>,
    axes: [VecDeque<f64>; 3],
    seen: u64,
    last_t: Option<f64>,
}

impl SampleBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "buffer capacity must be positive");
        Self {
            capacity,
            times: VecDeque::with_capacity(capacity),
            axes: std::array::from_fn(|_| VecDeque::with_capacity(capacity)),
            seen: 0,
            last_t: None,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity
    }

    /// Total samples ever pushed.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Appends `s`, evicting the oldest sample when full.
    pub fn push(&mut self, s: SensorSample) -> Result<()> {
        if let Some(prev) = self.last_t {
            if s.t < prev || s.t.is_nan() {
                return Err(Error::NonMonotonicTimestamp { prev, got: s.t });
            }
        }
        if self.is_full() {
            self.times.pop_front();
            for a in &mut self.axes {
                a.pop_front();
            }
        }
        self.times.push_back(s.t);
        for (a, v) in self.axes.iter_mut().zip(s.field.to_array()) {
            a.push_back(v);
        }
        self.last_t = Some(s.t);
        self.seen += 1;
        Ok(())
    }

    /// Oldest-first values of one axis (0 = x, 1 = y, 2 = z).
    pub fn axis(&self, axis: usize) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.axes[axis].iter().copied()
    }

    pub fn newest_time(&self) -> Option<f64> {
        self.times.back().copied()
    }

    /// Oldest-first copy of the window.
    pub fn window(&self) -> Vec<SensorSample> {
        (0..self.len())
            .map(|i| {
                SensorSample::new(
                    self.times[i],
                    Vec3::new(self.axes[0][i], self.axes[1][i], self.axes[2][i]),
                )
            })
            .collect()
    }

    pub fn clear(&mut self) {
        self.times.clear();
        for a in &mut self.axes {
            a.clear();
        }
        self.last_t = None;
        self.seen = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(i: usize) -> SensorSample {
        SensorSample::new(i as f64 * 0.01, Vec3::new(i as f64, -(i as f64), 2.0 * i as f64))
    }

    #[test]
    fn fills_then_evicts_oldest() {
        let mut b = SampleBuffer::new(50);
        for i in 1..=50 {
            b.push(sample(i)).unwrap();
        }
        assert!(b.is_full());
        assert_eq!(
            b.axis(0).collect::<Vec<_>>(),
            (1..=50).map(|i| i as f64).collect::<Vec<_>>()
        );
        b.push(sample(51)).unwrap();
        assert_eq!(b.len(), 50);
        assert_eq!(
            b.axis(0).collect::<Vec<_>>(),
            (2..=51).map(|i| i as f64).collect::<Vec<_>>()
        );
        assert_eq!(b.seen(), 51);
    }

    #[test]
    fn rejects_time_going_backwards() {
        let mut b = SampleBuffer::new(4);
        b.push(sample(3)).unwrap();
        b.push(sample(3)).unwrap();
        assert!(matches!(b.push(sample(2)), Err(Error::NonMonotonicTimestamp { .. })));
        assert_eq!(b.len(), 2);
    }

    proptest! {
        #[test]
        fn window_is_last_capacity_samples(cap in 1usize..64, n in 0usize..200) {
            let mut b = SampleBuffer::new(cap);
            let all: Vec<_> = (0..n).map(sample).collect();
            for s in &all {
                b.push(*s).unwrap();
            }
            let start = n.saturating_sub(cap);
            prop_assert_eq!(b.window(), all[start..].to_vec());
        }
    }
}

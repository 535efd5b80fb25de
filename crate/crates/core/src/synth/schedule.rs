use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SceneRng;
use crate::scalar::{wrap_degrees, Scalar};

/// Angle between consecutive leaves of a rosette.
///
/// Leaves come in triads of three. Inside a triad each leaf turns by
/// `within_triad_mean ± within_triad_jitter` from its predecessor. The first
/// leaf of triad `t >= 2` instead turns by `triad_offset_base / 2^(t-2)`
/// with jitter `triad_offset_jitter_base / 2^(t-2)`, so 60±10, 30±5,
/// 15±2.5 and so on. Leaf 1 opens triad 1 and gets a uniform angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleSchedule<T> {
    pub within_triad_mean: T,
    pub within_triad_jitter: T,
    pub triad_offset_base: T,
    pub triad_offset_jitter_base: T,
    /// Use interval midpoints instead of random draws and start at 0.
    pub zero_jitter: bool,
}

impl<T: Scalar> Default for AngleSchedule<T> {
    fn default() -> Self {
        Self {
            within_triad_mean: T::lit(127.5),
            within_triad_jitter: T::lit(12.5),
            triad_offset_base: T::lit(60.0),
            triad_offset_jitter_base: T::lit(10.0),
            zero_jitter: false,
        }
    }
}

impl<T: Scalar> AngleSchedule<T> {
    pub fn zero_jitter() -> Self {
        Self {
            zero_jitter: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.within_triad_mean,
            self.within_triad_jitter,
            self.triad_offset_base,
            self.triad_offset_jitter_base,
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("angle schedule constants must be finite".into()));
        }
        if self.within_triad_jitter < T::zero() || self.triad_offset_jitter_base < T::zero() {
            return Err(Error::Config("angle jitters must be >= 0".into()));
        }
        Ok(())
    }

    /// True when leaf `i` (1-based) opens a triad.
    pub fn opens_triad(i: u32) -> bool {
        i % 3 == 1
    }

    /// Closed interval of the step from leaf `i - 1` to leaf `i`, `i >= 2`.
    pub fn step_bounds(&self, i: u32) -> Result<(T, T)> {
        if i < 2 {
            return Err(Error::Contract(format!(
                "angle step defined for leaf index >= 2, got {i}"
            )));
        }
        let (mid, jitter) = if Self::opens_triad(i) {
            let triad = (i - 1) / 3 + 1;
            let halvings = T::lit(2.0).powi(triad as i32 - 2);
            (
                self.triad_offset_base / halvings,
                self.triad_offset_jitter_base / halvings,
            )
        } else {
            (self.within_triad_mean, self.within_triad_jitter)
        };
        Ok((mid - jitter, mid + jitter))
    }

    /// Angle of leaf 1.
    pub fn first_angle(&self, rng: &mut SceneRng) -> T {
        if self.zero_jitter {
            T::zero()
        } else {
            rng.uniform(T::zero(), T::lit(360.0))
        }
    }

    /// Angle of leaf `i` given the angle of leaf `i - 1`.
    pub fn next_angle(&self, i: u32, prev: T, rng: &mut SceneRng) -> Result<T> {
        let (lo, hi) = self.step_bounds(i)?;
        let step = if self.zero_jitter || lo == hi {
            (lo + hi) / T::lit(2.0)
        } else {
            rng.uniform(lo, hi)
        };
        Ok(wrap_degrees(prev + step))
    }

    /// Angles of leaves `1..=n`.
    pub fn sequence(&self, n: u32, rng: &mut SceneRng) -> Vec<T> {
        let mut out = Vec::with_capacity(n as usize);
        if n == 0 {
            return out;
        }
        out.push(self.first_angle(rng));
        for i in 2..=n {
            let prev = out[out.len() - 1];
            out.push(self.next_angle(i, prev, rng).expect("i >= 2"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_jitter_closed_form() {
        let s = AngleSchedule::<f64>::zero_jitter();
        let mut rng = SceneRng::for_scene(0, 0);
        let seq = s.sequence(8, &mut rng);
        // Steps: 127.5, 127.5, then 60 (triad 2), 127.5, 127.5, then 30.
        assert_eq!(seq, vec![0.0, 127.5, 255.0, 315.0, 82.5, 210.0, 240.0, 7.5]);
        assert_eq!(rng.draws(), 0);
    }

    #[test]
    fn bounds_per_triad() {
        let s = AngleSchedule::<f64>::default();
        assert_eq!(s.step_bounds(2).unwrap(), (115.0, 140.0));
        assert_eq!(s.step_bounds(3).unwrap(), (115.0, 140.0));
        assert_eq!(s.step_bounds(4).unwrap(), (50.0, 70.0));
        assert_eq!(s.step_bounds(7).unwrap(), (25.0, 35.0));
        assert_eq!(s.step_bounds(10).unwrap(), (12.5, 17.5));
        assert_eq!(s.step_bounds(13).unwrap(), (6.25, 8.75));
        assert!(matches!(s.step_bounds(1), Err(Error::Contract(_))));
    }

    #[test]
    fn f32_schedule_agrees() {
        let s = AngleSchedule::<f32>::zero_jitter();
        let mut rng = SceneRng::for_scene(0, 0);
        assert_eq!(s.sequence(4, &mut rng), vec![0.0, 127.5, 255.0, 315.0]);
    }

    #[test]
    fn rejects_negative_jitter() {
        let s = AngleSchedule::<f64> {
            within_triad_jitter: -1.0,
            ..Default::default()
        };
        assert!(s.validate().is_err());
    }
}

//! Deterministic random streams for scene generation.
//!
//! Every scene draws from its own ChaCha8 keystream. The 256-bit key holds
//! the global seed, the stream id is the image index and the keystream word
//! position is the draw counter, so a draw is a pure function of
//! `(global_seed, image_index, draw_counter)`. Nothing depends on thread
//! scheduling or on how many scenes were generated before.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Domain tag mixed into the key so scene streams never coincide with other
/// keyed uses of the same seed (random background crops).
const SCENE_DOMAIN: u64 = 0x6c65_6166_636f_6c6c;
const CROP_DOMAIN: u64 = 0x6372_6f70_6261_636b;

#[derive(Clone, Debug)]
pub struct SceneRng {
    inner: ChaCha8Rng,
    draws: u64,
}

impl SceneRng {
    /// Stream for scene `image_index` of a dataset generated with `global_seed`.
    pub fn for_scene(global_seed: u64, image_index: u64) -> Self {
        Self::keyed(global_seed, SCENE_DOMAIN, image_index)
    }

    /// Stream used when random-cropping background `index`.
    pub fn for_crop(seed: u64, index: u64) -> Self {
        Self::keyed(seed, CROP_DOMAIN, index)
    }

    fn keyed(seed: u64, domain: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.to_le_bytes());
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        Self { inner, draws: 0 }
    }

    /// Number of 64-bit draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`; returns `lo` when the interval is empty.
    pub fn uniform<T: Scalar>(&mut self, lo: T, hi: T) -> T {
        let u = T::lit(self.unit_f64());
        let v = lo + (hi - lo) * u;
        // Rounding in `f32` can land exactly on `hi`.
        if v >= hi && hi > lo {
            lo
        } else {
            v
        }
    }

    /// Uniform integer in the closed range `[lo, hi]`, unbiased.
    pub fn int_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty integer range {lo}..={hi}");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        lo + self.below(span + 1)
    }

    /// Uniform index in `[0, n)`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "cannot draw an index from an empty range");
        self.below(n as u64) as usize
    }

    // Lemire's widening-multiply rejection method.
    fn below(&mut self, n: u64) -> u64 {
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = (self.next_u64() as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}

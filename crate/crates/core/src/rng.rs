//! Seedable random streams with deterministic splitting.
//!
//! Every stream is keyed by a 64-bit seed and backed by ChaCha8, a
//! counter-based generator. `split(label)` derives a child stream from the
//! parent's seed and the label only, so the child does not depend on how
//! many values the parent has already produced. Forest training and the
//! replicate loops rely on this to stay independent of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream for `label`.
    pub fn split(&self, label: u64) -> Rng {
        Rng::new(derive_seed(self.seed, label))
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix64(
        mix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15))
            ^ mix64(label.wrapping_mul(0x2545_f491_4f6c_dd1d).wrapping_add(1)),
    )
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

//! Deterministic random streams.
//!
//! Every sampler takes an [`RngState`] explicitly. Replicate `i` of an
//! experiment with master seed `s` uses `RngState::derive(s, i)`, so a run
//! is a pure function of `(s, replicate count)` no matter how the replicates
//! are scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit seed for child stream `index` of `master_seed`.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let a = mix64(master_seed.wrapping_add(GOLDEN_GAMMA));
    mix64(a ^ mix64(index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(0x6A09_E667_F3BC_C909)))
}

/// Single-owner pseudorandom generator state.
#[derive(Debug, Clone)]
pub struct RngState {
    inner: ChaCha12Rng,
}

impl RngState {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Child stream `index` of `master_seed`.
    pub fn derive(master_seed: u64, index: u64) -> Self {
        Self::from_seed(derive_seed(master_seed, index))
    }
}

impl RngCore for RngState {
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

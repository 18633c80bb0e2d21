//! Reproducible random streams.
//!
//! Each replication owns one [`RngStream`], a ChaCha8 generator keyed by a
//! mixed master seed and positioned on its own 64-bit stream id. ChaCha is a
//! counter-based cipher, so distinct stream ids give non-overlapping keystreams
//! and the pair `(master_seed, stream_index)` fully determines the sequence.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer, used to derive keys and lane seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = mix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Independent family of streams for a different purpose (e.g. test jitter),
    /// addressed by the same stream index.
    pub fn lane(&self, lane: u64) -> Self {
        let seed = mix64(self.master_seed ^ mix64(lane.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Self::new(seed, self.stream_index)
    }
}

impl RngCore for RngStream {
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

/// Sum of `count` independent Rademacher signs, drawn 64 at a time.
pub fn rademacher_sum<R: RngCore + ?Sized>(count: u64, rng: &mut R) -> i64 {
    let mut total = 0i64;
    let mut left = count;
    while left >= 64 {
        total += 2 * i64::from(rng.next_u64().count_ones()) - 64;
        left -= 64;
    }
    if left > 0 {
        let bits = rng.next_u64() & ((1u64 << left) - 1);
        total += 2 * i64::from(bits.count_ones()) - left as i64;
    }
    total
}

//! Counter-based random streams.
//!
//! A stream is ChaCha8 keyed by `(seed, kind)` with the 64-bit ChaCha stream
//! id set to the path index; the block counter is the draw counter. Two
//! streams with different `(seed, kind, path_index)` never overlap, and a
//! stream can be positioned anywhere without replaying earlier draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates the random streams of unrelated simulations sharing a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamKind {
    Walk = 1,
    Branching = 2,
    Synthetic = 3,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, kind: StreamKind, path_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&(kind as u64).to_le_bytes());
        key[16..24].copy_from_slice(b"sprl-erw");
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(path_index);
        Self { inner }
    }

    pub fn walk(seed: u64, path_index: u64) -> Self {
        Self::new(seed, StreamKind::Walk, path_index)
    }

    pub fn branching(seed: u64, path_index: u64) -> Self {
        Self::new(seed, StreamKind::Branching, path_index)
    }

    /// Number of 32-bit words consumed so far.
    pub fn draw_counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn set_draw_counter(&mut self, words: u128) {
        self.inner.set_word_pos(words);
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on `{lo, …, hi-1}`.
    #[inline]
    pub fn index(&mut self, lo: u64, hi: u64) -> u64 {
        self.inner.random_range(lo..hi)
    }

    /// Standard exponential variate.
    #[inline]
    pub fn exp1(&mut self) -> f64 {
        self.inner.sample(rand_distr::Exp1)
    }

    /// Standard normal variate.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(rand_distr::StandardNormal)
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

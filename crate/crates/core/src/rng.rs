//! Seedable, splittable random streams.
//!
//! Every stream is a ChaCha8 generator (`rand_chacha::ChaCha8Rng`). The key is
//! expanded from the 64-bit seed with `SeedableRng::seed_from_u64`, and
//! substreams share the key but use distinct ChaCha stream ids. Output is
//! identical across platforms for a given `(seed, stream)` pair.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    /// Independent substream `id` of the same seed. Stream 0 is reserved for
    /// the root stream, so `split(i)` never collides with `new(seed)`.
    pub fn split(&self, id: u64) -> Self {
        Self::with_stream(self.seed, id.wrapping_add(1))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on (0, 1]; safe to pass to `ln`.
    pub fn uniform_open0(&mut self) -> f64 {
        1.0 - self.inner.random::<f64>()
    }

    /// Standard exponential by inversion.
    pub fn exp1(&mut self) -> f64 {
        -self.uniform_open0().ln()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.inner.random::<bool>()
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

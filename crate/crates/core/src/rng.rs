//! Counter-mode seed splitting: every stream is a ChaCha8 keyed by the master
//! seed with its own stream id, so shards never overlap and never touch ambient entropy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.master);
        r.set_stream(stream);
        r
    }

    /// A child splitter, for nesting (e.g. per-experiment then per-shard).
    pub fn child(&self, stream: u64) -> SeedStream {
        use rand::RngCore;
        SeedStream::new(self.rng(stream).next_u64())
    }
}

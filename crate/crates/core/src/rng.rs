//! Seeded random streams. Every consumer draws from its own ChaCha stream so
//! adding draws in one component never shifts another component's numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream identifiers, one per consumer.
pub mod streams {
    pub const METRIC: u64 = 1;
    pub const LOCI: u64 = 2;
    pub const SLACK: u64 = 3;
    pub const BOURGAIN: u64 = 4;
    pub const PROJECTION: u64 = 5;
    pub const REFINE: u64 = 6;
    pub const SUBSET: u64 = 7;
    pub const SAMPLING: u64 = 8;
    pub const INSTANCE: u64 = 9;
}

/// Generator for `(seed, stream)`; `sub` further splits a stream (per trial,
/// per repetition) without touching neighbouring streams.
pub fn stream(seed: u64, stream: u64, sub: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ sub.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream);
    rng
}

//! Deterministic random substreams for chunked parallel sampling.
//!
//! Chunk `i` of a run seeded with `seed` draws from
//! `ChaCha8Rng::seed_from_u64(substream_seed(seed, i))`, where
//! `substream_seed(seed, i) = splitmix64(seed ^ splitmix64(i))`. Results depend
//! only on `(seed, n, CHUNK_SIZE)`, never on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples drawn per substream.
pub const CHUNK_SIZE: u64 = 1 << 16;

/// The SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn substream_seed(seed: u64, chunk: u64) -> u64 {
    splitmix64(seed ^ splitmix64(chunk))
}

pub fn substream(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(seed, chunk))
}

/// Splits `n` samples into `(chunk index, chunk length)` pairs.
pub fn chunks(n: u64) -> impl Iterator<Item = (u64, u64)> + Clone {
    let count = n.div_ceil(CHUNK_SIZE);
    (0..count).map(move |i| (i, CHUNK_SIZE.min(n - i * CHUNK_SIZE)))
}

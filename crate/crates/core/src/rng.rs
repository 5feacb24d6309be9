//! Counter-based random substreams.
//!
//! Every random draw in the crate comes from a generator keyed by the user
//! seed plus a tuple of integer counters (item index, trial, m, ...). Results
//! therefore do not depend on evaluation order or on the number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a 64-bit key from a seed and a sequence of counters.
pub fn derive(seed: u64, keys: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &k in keys {
        h = splitmix64(h ^ splitmix64(k.wrapping_add(0x632B_E59B_D9B4_E019)));
    }
    h
}

/// Generator for the substream `(seed, keys...)`.
pub fn substream(seed: u64, keys: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive(seed, keys))
}

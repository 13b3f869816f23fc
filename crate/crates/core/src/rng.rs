//! Seeded random streams.
//!
//! All randomness flows from 64-bit seeds through ChaCha8, a counter-based
//! generator whose output is fixed across platforms. Independent streams for
//! trials and stages are derived by hashing `(seed, index)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Recorded in run manifests next to every seed.
pub const GENERATOR_VERSION: &str = "chacha8/rand_chacha-0.3/splitmix64-derive-v1";

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `seed`.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed for a labelled child stream, e.g. a pipeline stage.
pub fn labelled_seed(seed: u64, label: &str, index: u64) -> u64 {
    sub_seed(sub_seed(seed, fnv1a(label.as_bytes())), index)
}

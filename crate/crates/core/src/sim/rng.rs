//! Counter-based randomness.
//!
//! A trial owns a 64-bit key derived from `(master_seed, trial_index)`. Every random quantity
//! in the trial is a pure function of the key, a vertex identifier and a salt, so the order in
//! which vertices are explored never changes the realization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub const SALT_RADIUS: u64 = 0x5241_4449_5553_0001;
pub const SALT_STATIONS: u64 = 0x5354_4154_494F_4E53;
pub const SALT_STATION_RADIUS: u64 = 0x5354_4E52_4144_4955;
pub const SALT_CHILDREN: u64 = 0x4348_494C_4452_454E;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of trial `index` under `master_seed`.
pub fn trial_key(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index.wrapping_mul(GOLDEN))
}

/// A sequential generator for models that consume an ordinary stream.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    keyed_stream(trial_key(master_seed, index))
}

/// The sequential generator of the trial with key `key`.
pub fn keyed_stream(key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key)
}

/// Uniform on `(0, 1]` attached to `(key, id, salt)`.
pub fn unit(key: u64, id: u64, salt: u64) -> f64 {
    let x = splitmix64(key ^ splitmix64(id ^ salt));
    1.0 - (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Identifier of child `i` of the vertex `parent`; the root is 1.
pub fn child_id(parent: u64, i: u64) -> u64 {
    splitmix64(parent.wrapping_mul(GOLDEN) ^ (i + 1))
}

//! Seeded, splittable random streams.
//!
//! Every random draw in the crate goes through a [`ChaCha8Rng`]. Independent
//! sub-streams are derived by mixing a label and an index into the master
//! seed, so sample `i` of a dataset gets the same randomness no matter how
//! many samples are generated or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th item of the stream named `label` under `seed`.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = mix(seed);
    for b in label.bytes() {
        h = mix(h ^ b as u64);
    }
    mix(h ^ index)
}

pub fn substream(seed: u64, label: &str, index: u64) -> Rng {
    seeded(derive_seed(seed, label, index))
}

//! Seeding.
//!
//! Every run owns a private generator built from a single 64-bit seed, so a
//! batch of runs produces the same numbers no matter how it is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every simulation in the crate.
pub type SimRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer (a bijection on `u64`).
#[inline]
pub fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for stream `index` under `base_seed`.
///
/// This is the `index`-th output of a SplitMix64 generator started at
/// `base_seed`. For a fixed base the map is injective in `index`, since
/// `base + (index + 1) * GOLDEN_GAMMA` is injective modulo 2^64 (the gamma is
/// odd) and the finalizer is a bijection.
#[inline]
pub fn mix_seed(base_seed: u64, index: u64) -> u64 {
    avalanche(base_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn matches_reference_splitmix64() {
        // First outputs of SplitMix64 seeded with 0.
        assert_eq!(mix_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(mix_seed(0, 2), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn no_collisions_within_a_base() {
        for base in [0u64, 1, 42, u64::MAX] {
            let seen: HashSet<u64> = (0..5_000).map(|i| mix_seed(base, i)).collect();
            assert_eq!(seen.len(), 5_000);
        }
    }
}

//! Deterministic RNG plumbing.
//!
//! Every stochastic component takes an explicit u64 seed.  Per-item
//! seeds are derived from a base seed with the splitmix64 finalizer so
//! parallel workers get independent, reproducible streams whose values
//! do not depend on scheduling.  All sampling runs on ChaCha8, whose
//! output stream is specified independently of platform; dataset
//! manifests record both identifiers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_ALGO: &str = "chacha8";
pub const SEED_DERIVATION: &str = "splitmix64";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer: avalanches one 64-bit state word.
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Seed for the `index`-th child stream of `base`.  Equal to the
/// `index`-th output of a splitmix64 generator seeded with `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix(base.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn derive_matches_published_splitmix64_vectors() {
        // First three outputs of splitmix64 seeded with 0, from the
        // reference implementation.
        assert_eq!(derive_seed(0, 0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(derive_seed(0, 1), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(derive_seed(0, 2), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn derived_seeds_are_distinct_across_indices_and_bases() {
        let mut seen = std::collections::HashSet::new();
        for base in [0u64, 1, 2, 0xDEAD_BEEF, u64::MAX] {
            for idx in 0..1000 {
                assert!(seen.insert(derive_seed(base, idx)));
            }
        }
    }

    #[test]
    fn chacha_stream_is_stable() {
        // Pin the ChaCha8 output stream so a library upgrade that
        // silently changed sampling would be caught.
        let mut rng = rng_from_seed(42);
        assert_eq!(rng.next_u64(), 0xAE90_BFB5_395D_5BA1);
        assert_eq!(rng.next_u64(), 0xF345_3FC6_2579_9188);
    }
}

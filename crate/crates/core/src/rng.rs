//! Seed derivation. Every chain gets its own ChaCha stream so its draws do
//! not depend on which other chains are active.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const INIT_STREAM: u64 = u64::MAX;

/// Random stream owned by chain `index`.
pub fn chain_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Stream used for drawing random initializations.
pub fn init_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    rng
}

/// Seed of replication `rep` under `base` (SplitMix64 finalizer).
pub fn replication_seed(base: u64, rep: u64) -> u64 {
    let mut z = base
        .wrapping_add(rep.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

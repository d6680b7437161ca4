//! Seeding. Every random choice in the crate flows from a 64-bit seed;
//! parallel work derives one seed per task with [`derive_seed`] so results
//! do not depend on how tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for task `index` under `root`.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    mix(mix(root ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn task_rng(root: u64, index: u64) -> Rng {
    seeded(derive_seed(root, index))
}

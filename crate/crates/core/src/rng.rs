//! Seedable randomness. Every experiment records a master `u64` seed;
//! per-trial seeds are derived with splitmix64 so trials are independent
//! and individually reproducible.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The pseudo-random stream used by all randomized schedulers.
pub type Stream = ChaCha8Rng;

pub fn stream_from_seed(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 step; a good mixer for deriving per-trial seeds.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for trial `index` of an experiment with the given master seed.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    let mut state = master;
    let base = splitmix64(&mut state);
    let mut s = base ^ index.wrapping_mul(0xa076_1d64_78bd_642f);
    splitmix64(&mut s)
}

//! Counter-based stream derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! key obtained by mixing a master seed with a domain tag and a tuple of
//! integers (site coordinates, trial index, walk id, vertex id). Streams are
//! therefore independent of thread schedules and evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const TAG_SITE_ENV: u64 = 0x5349_5445_454e_5631;
pub(crate) const TAG_WALK_STEPS: u64 = 0x5741_4c4b_5354_4550;
pub(crate) const TAG_TRIAL_ENV: u64 = 0x5452_4941_4c45_4e56;
pub(crate) const TAG_GRAPH_ENV: u64 = 0x4752_4150_4845_4e56;
pub(crate) const TAG_GRAPH_STEPS: u64 = 0x4752_4150_4853_5450;
pub(crate) const TAG_DERIVE: u64 = 0x4445_5249_5645_0001;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `words` into a key under `(master, tag)`.
#[inline]
pub fn stream_key(master: u64, tag: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = mix64(master ^ mix64(tag));
    for w in words {
        h = mix64(h ^ w);
    }
    h
}

pub fn stream(master: u64, tag: u64, words: impl IntoIterator<Item = u64>) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(master, tag, words))
}

/// Derives a child seed for a named sub-experiment.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    stream_key(master, TAG_DERIVE, label.bytes().map(u64::from))
}

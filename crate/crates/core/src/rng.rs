//! Seeded, platform-independent randomness.
//!
//! Every generator is a `Xoshiro256StarStar` seeded through SplitMix64
//! (`seed_from_u64`). Bounded draws use Lemire's multiply-and-reject method so
//! a given seed produces the same stream of indices everywhere.

use rand_core::{RngCore, SeedableRng};
pub use rand_xoshiro::Xoshiro256StarStar as Rng;

pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Uniform integer in `0..bound`. `bound` must be nonzero.
pub fn below(rng: &mut Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let threshold = bound.wrapping_neg() % bound;
    loop {
        let m = u128::from(rng.next_u64()) * u128::from(bound);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

/// Fisher-Yates, walking from the back.
pub fn shuffle<T>(rng: &mut Rng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

pub fn permutation(rng: &mut Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    shuffle(rng, &mut p);
    p
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from a master seed, a fixed label and an index.
pub fn subseed(master: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix(splitmix(master ^ h).wrapping_add(index))
}

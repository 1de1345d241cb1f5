//! Deterministic seed derivation.
//!
//! Replicates, samplers, and basis draws each get their own ChaCha stream
//! whose seed is derived injectively from a root seed plus a context path
//! (e.g. `[N, replicate]`). Changing one replicate never affects another,
//! and reruns with the same root seed reproduce every stream bit-exactly.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer; full-period bijection on u64.
#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a stream seed from `root` and a context path.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    let mut state = splitmix(root ^ 0x6c62_272e_07bb_0142);
    for (i, &part) in path.iter().enumerate() {
        state = splitmix(state ^ part.wrapping_add((i as u64 + 1) << 56));
    }
    state
}

/// ChaCha12 stream for the given root seed and context path.
pub fn stream(root: u64, path: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(root, path))
}

/// FNV-1a over bytes, used for stable config digests.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

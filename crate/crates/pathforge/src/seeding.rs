//! Deterministic sub-seed derivation.
//!
//! Batch operations hand every item its own random stream so that concurrency
//! and processing order can never change results. Streams are derived by
//! hashing the parent seed together with a stable item tag (a sample id, a
//! step index, a scenario name) — SHA-256, truncated to 64 bits. The hash is
//! fixed by the standard, so derived seeds are identical on every platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed from `base` and a stable `tag`.
///
/// Different tags give statistically independent streams; the same
/// `(base, tag)` pair always gives the same seed.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update([0x1f]); // domain separator between seed and tag bytes
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// A seeded generator for `(base, tag)`. ChaCha has a portable, version-stable
/// stream, unlike `StdRng`, which documents itself as non-portable.
pub fn rng_for(base: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, tag))
}

/// In-place Fisher–Yates shuffle driven by an explicit generator.
///
/// Spelled out rather than delegated so the byte-level permutation contract
/// survives dependency upgrades: for `i = n-1 .. 1`, draw `j` uniformly from
/// `0..=i` and swap.
pub fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    use rand::Rng;
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// The permutation `fisher_yates` would apply to a slice of length `n`:
/// `perm[k]` is the original index of the item that ends up at position `k`.
pub fn seeded_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    fisher_yates(&mut perm, rng);
    perm
}

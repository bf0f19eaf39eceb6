//! Deterministic substream derivation for reproducible parallel runs.
//!
//! Every random draw in the simulator comes from a ChaCha8 stream whose seed
//! is derived from the base seed plus a list of integer ids (sweep point,
//! mode, trial index, redraw attempt, purpose). Derivation is a splitmix64
//! chain, so `(seed, ids)` fully determines the stream regardless of thread
//! count or completion order.
//!
//! The derivation is part of the output contract: golden tests pin both the
//! derived seeds and the first draws of the streams they produce.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags used as the final id of a derivation chain.
pub mod stream_id {
    /// User-distance draws within a trial.
    pub const DISTANCES: u64 = 1;
    /// Channel matrix draws within a trial.
    pub const CHANNEL: u64 = 2;
    /// Monte-Carlo mutual-information oracle sampling.
    pub const MC_ORACLE: u64 = 3;
    /// Per-point seed derivation inside a sweep.
    pub const SWEEP_POINT: u64 = 4;
}

/// One round of splitmix64.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a base seed and an ordered id list.
///
/// The chain is order-sensitive and length-sensitive:
/// `s0 = splitmix64(base)`, then `s = splitmix64(s ^ splitmix64(id))` per id.
pub fn derive_seed(base: u64, ids: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &id in ids {
        s = splitmix64(s ^ splitmix64(id));
    }
    s
}

/// ChaCha8 stream for the given derivation chain.
pub fn substream(base: u64, ids: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, ids))
}

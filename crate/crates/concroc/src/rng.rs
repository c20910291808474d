//! Deterministic RNG stream derivation. Every independent unit of work
//! (bootstrap replicate, simulation replication) draws from its own
//! stream derived from the master seed and the unit's index, so output
//! never depends on scheduling order or worker count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

// splitmix64 step: advances the state and returns a mixed output word.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with a path of context words (scenario id,
/// replication index, and similar) into a single derived seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut acc = master;
    for &p in parts {
        let mut s = acc ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        acc = splitmix64(&mut s);
    }
    acc
}

/// Build the ChaCha stream for one unit of work.
pub fn derive_rng(master: u64, parts: &[u64]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut s = derive_seed(master, parts);
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw on the open interval (0, 1): 53 significant bits,
/// offset half an ulp so 0 and 1 are unreachable.
pub fn uniform_open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Unbiased uniform index in [0, n) by rejection on the top range.
pub fn sample_index<R: RngCore + ?Sized>(rng: &mut R, n: usize) -> usize {
    debug_assert!(n > 0);
    let range = n as u64;
    let zone = (u64::MAX / range) * range;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % range) as usize;
        }
    }
}

//! Deterministic per-trial random streams.
//!
//! Every Monte Carlo trial owns an independent counter-based stream derived
//! from `(master_seed, trial_index)`: the pair is expanded through
//! SplitMix64 into a 32-byte ChaCha8 key. Trials are therefore reproducible
//! and order-independent, which makes results bitwise identical for any
//! worker count.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// The per-trial generator type.
pub type TrialRng = ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for trial `trial_index` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial_index: u64) -> TrialRng {
    let mut state = master_seed ^ trial_index.wrapping_mul(0xA076_1D64_78BD_642F);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform draw in `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#![allow(dead_code)] // not every test crate uses every helper

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tubal::Tube;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Max-entry difference relative to the larger operand scale.
pub fn rel_diff(a: &Tube, b: &Tube) -> f64 {
    a.max_abs_diff(b) / (1.0 + a.max_abs().max(b.max_abs()))
}

//! Counter-based uniform streams for common random numbers.
//!
//! Coordinate `k` of replicate `r` always reads the `r`-th 64-bit word of
//! ChaCha8 stream `k` under the run seed, so the draw is the same whatever
//! member is selected at `k` or elsewhere, and whatever order the
//! replicates are processed in. Stream 0 is reserved for restart
//! selections.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream used to draw random restart selections.
pub const RESTART_STREAM: u64 = 0;

/// Maps the top 52 bits to a cell midpoint in `(0, 1)`. With 53 bits the
/// top midpoint `1 - 2^-54` would round to 1.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// A generator positioned on stream `stream` at replicate `rep`.
pub fn stream_at(seed: u64, stream: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(2 * u128::from(rep));
    rng
}

/// Uniforms for coordinate `k >= 1` and replicates `start..start + out.len()`.
pub fn fill_uniforms(seed: u64, k: usize, start: u64, out: &mut [f64]) {
    let mut rng = stream_at(seed, k as u64, start);
    for u in out {
        *u = unit_open(rng.next_u64());
    }
}

/// The uniform of coordinate `k >= 1`, replicate `rep`.
pub fn uniform(seed: u64, k: usize, rep: u64) -> f64 {
    unit_open(stream_at(seed, k as u64, rep).next_u64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_and_pointwise_agree() {
        let mut block = vec![0.0; 37];
        fill_uniforms(9, 4, 100, &mut block);
        for (i, u) in block.iter().enumerate() {
            assert_eq!(*u, uniform(9, 4, 100 + i as u64));
            assert!(*u > 0.0 && *u < 1.0);
        }
        assert_ne!(uniform(9, 4, 0), uniform(9, 5, 0));
        assert_ne!(uniform(9, 4, 0), uniform(10, 4, 0));
    }

    #[test]
    fn unit_open_extremes() {
        assert!(unit_open(0) > 0.0);
        assert!(unit_open(u64::MAX) < 1.0);
        assert_eq!(1.0 - unit_open(u64::MAX), unit_open(0));
    }
}

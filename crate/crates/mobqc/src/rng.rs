//! Seeded random streams.
//!
//! All randomness in the crate flows from explicit seeds. A named substream
//! derives an independent generator from a master seed, so that e.g. the
//! server, client and sampler of one run never share a stream and results
//! stay reproducible when one consumer draws more values than before.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic generator for `(seed, name)`.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(name))
}

/// Uniform draw in [0, 1) from any `RngCore`.
pub fn unit_f64(rng: &mut dyn RngCore) -> f64 {
    // 53 random mantissa bits
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in [0, n).
pub fn index(rng: &mut dyn RngCore, n: usize) -> usize {
    debug_assert!(n > 0);
    // rejection-free for our small n; bias is < n / 2^53
    (unit_f64(rng) * n as f64) as usize % n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substreams_are_reproducible_and_distinct() {
        let mut a1 = substream(7, "server");
        let mut a2 = substream(7, "server");
        let mut b = substream(7, "client");
        let xs: Vec<u64> = (0..4).map(|_| a1.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| a2.next_u64()).collect();
        let zs: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn unit_f64_in_range() {
        let mut rng = substream(1, "t");
        for _ in 0..1000 {
            let x = unit_f64(&mut rng);
            assert!((0.0..1.0).contains(&x));
        }
    }
}

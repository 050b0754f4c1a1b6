//! Counter-based deterministic randomness.
//!
//! Every random draw in the crate is a pure function of
//! `(seed, stream, counter)`, so sampling is reproducible across runs and
//! independent of evaluation order or thread schedule. Not suitable for
//! cryptographic use.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 finalizer.
#[inline]
fn fin(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// 64 uniform bits for `(seed, stream, counter)`.
#[inline]
pub fn mix(seed: u64, stream: u64, counter: u64) -> u64 {
    fin(fin(fin(seed) ^ stream) ^ counter)
}

/// Uniform draw in `[0, 1)`.
#[inline]
pub fn unit(seed: u64, stream: u64, counter: u64) -> f64 {
    // 53 high bits -> dyadic rational in [0, 1)
    (mix(seed, stream, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[lo, hi]`; degenerate ranges return `lo`.
#[inline]
pub fn range(seed: u64, stream: u64, counter: u64, lo: f64, hi: f64) -> f64 {
    lo + unit(seed, stream, counter) * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_pure() {
        assert_eq!(mix(42, 1, 7), mix(42, 1, 7));
        assert_ne!(mix(42, 1, 7), mix(42, 1, 8));
        assert_ne!(mix(42, 1, 7), mix(42, 2, 7));
        assert_ne!(mix(42, 1, 7), mix(43, 1, 7));
    }

    #[test]
    fn unit_in_half_open_interval() {
        for counter in 0..10_000 {
            let u = unit(7, 3, counter);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn degenerate_range_is_constant() {
        for counter in 0..100 {
            assert_eq!(range(1, 1, counter, -1.0, -1.0), -1.0);
        }
    }
}

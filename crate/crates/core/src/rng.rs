//! Counter-based pseudo-random streams.
//!
//! Every random quantity in the crate is a pure function of a 64-bit master
//! seed and an integer counter, so results never depend on iteration order
//! or thread scheduling.

/// SplitMix64 finalizer: a bijective 64-bit mix with good avalanche.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a stream index.
#[inline]
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix(seed ^ mix(stream.wrapping_add(0x51a9_ce3f_8d2b_7c41)))
}

/// Uniform draw in [0, 1) from a (seed, counter) pair; 53-bit resolution.
#[inline]
pub fn uniform(seed: u64, counter: u64) -> f64 {
    let bits = mix(seed.wrapping_add(mix(counter)));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform phase in [0, 2π) from a (seed, counter) pair.
#[inline]
pub fn phase(seed: u64, counter: u64) -> f64 {
    uniform(seed, counter) * std::f64::consts::TAU
}

/// FNV-1a 64-bit hash; used for stable configuration digests.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_stable() {
        // Frozen values guard against accidental algorithm changes that
        // would silently alter every seeded artifact.
        assert_eq!(mix(0), 0xe220a8397b1dcdaf);
        assert_eq!(mix(1), 0x910a2dec89025cc1);
    }

    #[test]
    fn uniform_in_range_and_deterministic() {
        for c in 0..1000 {
            let u = uniform(42, c);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u, uniform(42, c));
        }
    }

    #[test]
    fn streams_differ() {
        assert_ne!(derive(7, 0), derive(7, 1));
        assert_ne!(uniform(7, 0), uniform(8, 0));
    }
}

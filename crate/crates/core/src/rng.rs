//! Counter-based deterministic random numbers.
//!
//! Every variate is a pure function of a (seed, stream, counter) key, so
//! parallel and serial runs agree bit-for-bit no matter how work is chunked.
//! The mixer is the splitmix64 finalizer applied to the combined key; its
//! avalanche quality is plenty for Monte Carlo use here (uniformity is
//! checked statistically in the random-model tests).

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mix three 64-bit words into one.
#[inline]
pub fn mix3(seed: u64, stream: u64, counter: u64) -> u64 {
    let a = splitmix64(seed ^ 0x243f6a8885a308d3);
    let b = splitmix64(a ^ stream);
    splitmix64(b ^ counter.wrapping_mul(0x9e3779b97f4a7c15))
}

/// Uniform in [0, 1) from a mixed word (53 mantissa bits).
#[inline]
pub fn u01(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform in [0, 1) for key (seed, stream, counter).
#[inline]
pub fn uniform(seed: u64, stream: u64, counter: u64) -> f64 {
    u01(mix3(seed, stream, counter))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_stream_separated() {
        assert_eq!(mix3(1, 2, 3), mix3(1, 2, 3));
        assert_ne!(mix3(1, 2, 3), mix3(1, 2, 4));
        assert_ne!(mix3(1, 2, 3), mix3(1, 3, 3));
        assert_ne!(mix3(1, 2, 3), mix3(2, 2, 3));
    }

    #[test]
    fn u01_in_range_with_sane_mean() {
        let n = 100_000u64;
        let mut sum = 0.0;
        for i in 0..n {
            let u = uniform(42, 7, i);
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }
}

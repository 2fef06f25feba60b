//! Segmented prime sieve and prime-power (von Mangoldt) enumeration.

use crate::error::{Error, Result};

const DEFAULT_LIMIT: f64 = 1e9;

/// All primes <= x, ascending, by a segmented sieve of Eratosthenes.
pub fn sieve_primes(x: f64) -> Result<Vec<u64>> {
    sieve_primes_capped(x, DEFAULT_LIMIT)
}

pub fn sieve_primes_capped(x: f64, limit: f64) -> Result<Vec<u64>> {
    if x < 2.0 {
        return Err(Error::Domain(format!("sieve bound must be >= 2, got {x}")));
    }
    if x > limit {
        return Err(Error::Capacity {
            requested: x,
            limit,
        });
    }
    let n = x.floor() as u64;
    let root = (n as f64).sqrt() as u64 + 1;
    // base sieve up to sqrt(n)
    let mut base = vec![true; (root + 1) as usize];
    base[0] = false;
    if root >= 1 {
        base[1] = false;
    }
    let mut p = 2u64;
    while p * p <= root {
        if base[p as usize] {
            let mut q = p * p;
            while q <= root {
                base[q as usize] = false;
                q += p;
            }
        }
        p += 1;
    }
    let base_primes: Vec<u64> = (2..=root).filter(|&i| base[i as usize]).collect();

    let mut primes: Vec<u64> =
        Vec::with_capacity(((n as f64) / (n as f64).ln().max(2.0) * 1.2) as usize);
    primes.extend(base_primes.iter().copied().filter(|&q| q <= n));

    const SEG: u64 = 1 << 18;
    let mut seg = vec![true; SEG as usize];
    let mut lo = root + 1;
    while lo <= n {
        let hi = (lo + SEG - 1).min(n);
        let len = (hi - lo + 1) as usize;
        seg[..len].fill(true);
        for &q in &base_primes {
            if q * q > hi {
                break;
            }
            let mut m = lo.div_ceil(q) * q;
            if m < q * q {
                m = q * q;
            }
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += q;
            }
        }
        for i in 0..len {
            if seg[i] {
                primes.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    Ok(primes)
}

/// (n, Lambda(n)) for all prime powers n <= x, ascending in n.
pub fn von_mangoldt_support(x: f64, primes: &[u64]) -> Vec<(u64, f64)> {
    let n = x.floor() as u64;
    let mut out = Vec::new();
    for &p in primes {
        if p > n {
            break;
        }
        let lp = (p as f64).ln();
        let mut q = p;
        loop {
            out.push((q, lp));
            match q.checked_mul(p) {
                Some(next) if next <= n => q = next,
                _ => break,
            }
        }
    }
    out.sort_by_key(|&(q, _)| q);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain sieve, kept deliberately separate from the segmented one.
    fn simple_sieve(n: usize) -> Vec<u64> {
        let mut flags = vec![true; n + 1];
        flags[0] = false;
        if n >= 1 {
            flags[1] = false;
        }
        for i in 2..=n {
            if flags[i] {
                let mut j = i * i;
                while j <= n {
                    flags[j] = false;
                    j += i;
                }
            }
        }
        (2..=n).filter(|&i| flags[i]).map(|i| i as u64).collect()
    }

    #[test]
    fn tiny_bound() {
        assert_eq!(sieve_primes(10.0).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2.0).unwrap(), vec![2]);
        assert!(sieve_primes(1.5).is_err());
    }

    #[test]
    fn pi_of_one_million_against_simple_sieve() {
        let fast = sieve_primes(1e6).unwrap();
        assert_eq!(fast.len(), 78498);
        let slow = simple_sieve(1_000_000);
        assert_eq!(fast, slow);
    }

    #[test]
    fn mertens_sum_sanity() {
        let primes = sieve_primes(1e6).unwrap();
        let sum: f64 = primes.iter().map(|&p| 1.0 / p as f64).sum();
        let diff = sum - (1e6f64.ln()).ln();
        // Mertens constant 0.26149...
        assert!((diff - 0.2615).abs() < 5e-3, "diff = {diff}");
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(
            sieve_primes(2e9),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn von_mangoldt_enumeration() {
        let primes = sieve_primes(32.0).unwrap();
        let vm = von_mangoldt_support(32.0, &primes);
        let ns: Vec<u64> = vm.iter().map(|&(n, _)| n).collect();
        assert_eq!(
            ns,
            vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32]
        );
        for &(n, l) in &vm {
            let mut m = n;
            let mut p = 0u64;
            for &q in &primes {
                if m % q == 0 {
                    p = q;
                    while m % q == 0 {
                        m /= q;
                    }
                    break;
                }
            }
            assert_eq!(m, 1);
            assert!((l - (p as f64).ln()).abs() < 1e-15);
        }
    }
}

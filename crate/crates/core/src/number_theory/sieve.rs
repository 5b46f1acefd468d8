use super::PrimeTable;
use crate::error::{domain, Error, Result};

/// Largest sieve limit accepted by [`sieve_primes`].
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

// Odd numbers per segment; 256 KiB of flags.
const SEGMENT_ODDS: u64 = 1 << 18;

pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with_cap(limit, DEFAULT_SIEVE_CAP)
}

/// Segmented odd-only sieve of Eratosthenes.
pub fn sieve_primes_with_cap(limit: u64, cap: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(domain!("sieve limit must be >= 2, got {limit}"));
    }
    if limit > cap {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds the memory cap {cap}"
        )));
    }
    if limit > u32::MAX as u64 {
        return Err(Error::Resource(format!(
            "sieve limit {limit} does not fit 32-bit prime storage"
        )));
    }

    let root = isqrt(limit);
    let base = small_sieve(root);

    let mut primes: Vec<u32> = Vec::with_capacity(estimate_count(limit));
    primes.push(2);

    // Segment k covers odd numbers 2i+1 for i in [lo, hi).
    let total_odds = limit.div_ceil(2); // odd numbers 1, 3, ..., <= limit
    let mut flags = vec![true; SEGMENT_ODDS as usize];
    let mut lo = 1u64; // skip 1
    while lo < total_odds {
        let hi = (lo + SEGMENT_ODDS).min(total_odds);
        let len = (hi - lo) as usize;
        flags[..len].fill(true);
        let seg_first = 2 * lo + 1;
        let seg_last = 2 * (hi - 1) + 1;
        for &p in base.iter().skip(1) {
            let p = p as u64;
            let sq = p * p;
            if sq > seg_last {
                break;
            }
            let mut start = if sq >= seg_first {
                sq
            } else {
                let r = seg_first % p;
                let m = if r == 0 {
                    seg_first
                } else {
                    seg_first + (p - r)
                };
                if m % 2 == 0 {
                    m + p
                } else {
                    m
                }
            };
            while start <= seg_last {
                flags[((start - 1) / 2 - lo) as usize] = false;
                start += 2 * p;
            }
        }
        primes.extend(
            flags[..len]
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(i, _)| (2 * (lo + i as u64) + 1) as u32),
        );
        lo = hi;
    }

    Ok(PrimeTable::from_parts(limit, primes))
}

fn small_sieve(limit: u64) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 100.0 {
        32
    } else {
        (1.3 * x / x.ln()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: trial division against all smaller primes.
    fn trial_division_primes(limit: u64) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for n in 2..=limit as u32 {
            if out
                .iter()
                .take_while(|&&p| (p as u64) * (p as u64) <= n as u64)
                .all(|&p| n % p != 0)
            {
                out.push(n);
            }
        }
        out
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(3).unwrap().primes(), &[2, 3]);
        assert_eq!(sieve_primes(9).unwrap().primes(), &[2, 3, 5, 7]);
    }

    #[test]
    fn errors() {
        assert!(matches!(sieve_primes(1), Err(Error::Domain(_))));
        match sieve_primes_with_cap(1000, 999) {
            Err(Error::Resource(msg)) => assert!(msg.contains("999")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn agrees_with_trial_division() {
        let oracle = trial_division_primes(100_000);
        for limit in [2u64, 50, 1_000, 65_537, 100_000] {
            let t = sieve_primes(limit).unwrap();
            let want: Vec<u32> = oracle
                .iter()
                .copied()
                .filter(|&p| p as u64 <= limit)
                .collect();
            assert_eq!(t.primes(), want.as_slice(), "limit {limit}");
        }
    }

    #[test]
    fn crosses_segment_boundaries() {
        // several segments; count from the reference value pi(10^6)
        let t = sieve_primes(1_000_000).unwrap();
        assert_eq!(t.len(), 78_498);
        let t = sieve_primes(3 * SEGMENT_ODDS * 2 + 17).unwrap();
        let oracle = small_sieve(3 * SEGMENT_ODDS * 2 + 17);
        assert_eq!(t.primes(), oracle.as_slice());
    }
}

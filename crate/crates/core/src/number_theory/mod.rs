//! Primes, the von Mangoldt function and the tapered mollifier weight.

mod cache;
mod sieve;

pub use cache::{read_prime_cache, write_prime_cache, PRIME_CACHE_MAGIC};
pub use sieve::{sieve_primes, sieve_primes_with_cap, DEFAULT_SIEVE_CAP};

use crate::error::{domain, Result};
use crate::summation::NeumaierSum;

/// Immutable table of all primes up to `limit`.
///
/// Factorization access goes through [`PrimeTable::smallest_factor`], which
/// trial-divides by the stored primes; no per-integer factor array is kept so
/// that limits near 10^9 fit in memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    pub(crate) fn from_parts(limit: u64, primes: Vec<u32>) -> Self {
        Self { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        if n > self.limit {
            return None;
        }
        Some(u32::try_from(n).is_ok_and(|n| self.primes.binary_search(&n).is_ok()))
    }

    /// Least prime factor of `n`, for `2 <= n <= limit^2`.
    pub fn smallest_factor(&self, n: u64) -> Result<u64> {
        if n < 2 {
            return Err(domain!("smallest_factor needs n >= 2, got {n}"));
        }
        let lim = self.limit as u128;
        if (n as u128) > lim * lim {
            return Err(domain!(
                "n = {n} exceeds limit^2 = {} of the prime table",
                lim * lim
            ));
        }
        for &p in &self.primes {
            let p = p as u64;
            if p * p > n {
                break;
            }
            if n % p == 0 {
                return Ok(p);
            }
        }
        Ok(n)
    }

    /// Primes `p` with `lo < p <= hi`.
    pub fn primes_in(&self, lo: f64, hi: f64) -> &[u32] {
        let start = self.primes.partition_point(|&p| (p as f64) <= lo);
        let end = self.primes.partition_point(|&p| (p as f64) <= hi);
        if start >= end {
            &[]
        } else {
            &self.primes[start..end]
        }
    }

    pub(crate) fn check_covers(&self, hi: f64) -> Result<()> {
        if hi > self.limit as f64 {
            Err(domain!(
                "prime table too small: need primes up to {hi}, table limit is {}",
                self.limit
            ))
        } else {
            Ok(())
        }
    }
}

fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = n;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            p = d;
            break;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}

/// `Λ(n)`: `log p` when `n = p^k`, otherwise zero.
pub fn von_mangoldt(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain!("von Mangoldt function is defined for n >= 1"));
    }
    Ok(prime_power_base(n).map_or(0.0, |p| (p as f64).ln()))
}

/// Weight applied to `Λ(n)` by the tapered mollifier: 1 up to `x`, then
/// `log(x^2/n) / log x` down to zero at `x^2`.
#[inline]
pub fn taper_factor(n: f64, x: f64) -> f64 {
    if n <= x {
        1.0
    } else if n < x * x {
        (x * x / n).ln() / x.ln()
    } else {
        0.0
    }
}

/// `Λ_X(n)`, the von Mangoldt function tapered linearly in `log n` between
/// `X` and `X^2`.
pub fn lambda_x(n: u64, x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(domain!("lambda_X needs X >= 2, got {x}"));
    }
    let lambda = von_mangoldt(n)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(lambda * taper_factor(n as f64, x))
}

/// `Σ_{lo < p <= hi} 1/p`.
pub fn reciprocal_prime_sum(lo: f64, hi: f64, table: &PrimeTable) -> Result<f64> {
    if !(lo >= 0.0) || !(lo < hi) {
        return Err(domain!(
            "reciprocal_prime_sum needs 0 <= lo < hi, got ({lo}, {hi})"
        ));
    }
    table.check_covers(hi)?;
    let mut acc = NeumaierSum::new();
    for &p in table.primes_in(lo, hi) {
        acc.add(1.0 / p as f64);
    }
    Ok(acc.value())
}

/// `½ Σ_{p <= X} p^{-2σ₀}`, the variance of the real prime sum under
/// independent uniform phases.
pub fn prime_variance(x: f64, sigma0: f64, table: &PrimeTable) -> Result<f64> {
    if !(0.5..=1.0).contains(&sigma0) {
        return Err(domain!(
            "prime_variance needs 1/2 <= sigma0 <= 1, got {sigma0}"
        ));
    }
    if !(x > 0.0) {
        return Err(domain!("prime_variance needs X > 0, got {x}"));
    }
    table.check_covers(x)?;
    let mut acc = NeumaierSum::new();
    for &p in table.primes_in(0.0, x) {
        acc.add((p as f64).powf(-2.0 * sigma0));
    }
    Ok(0.5 * acc.value())
}

use crate::error::{domain, Result};
use crate::number_theory::{taper_factor, PrimeTable};
use crate::summation::{ComplexSum, NeumaierSum};
use crate::zeta::SPoint;
use num_complex::Complex64;

/// The mollifier `𝒫(s) = Σ_{n<X²} Λ_X(n) / (n^s log n)`.
///
/// Only prime powers contribute; for `n = p^k` the summand weight
/// `Λ_X(n)/log n` reduces to `taper(n)/k`.
pub fn mollifier_p(s0: SPoint, x: f64, table: &PrimeTable) -> Result<Complex64> {
    if !(x >= 2.0) {
        return Err(domain!("mollifier needs X >= 2, got {x}"));
    }
    if !(s0.sigma > 0.0) {
        return Err(domain!("mollifier needs Re(s) > 0, got {s0}"));
    }
    let x2 = x * x;
    let largest = x2.ceil() - 1.0;
    if (table.limit() as f64) < largest {
        return Err(domain!(
            "prime table limit {} too small for n < X^2 = {x2}",
            table.limit()
        ));
    }
    let mut acc = ComplexSum::new();
    for &p in table.primes_in(0.0, largest) {
        let pf = p as f64;
        let lp = pf.ln();
        let mut pk = pf;
        let mut k = 1u32;
        while pk < x2 {
            let weight = taper_factor(pk, x) / k as f64;
            if weight > 0.0 {
                let ln_n = k as f64 * lp;
                acc.add(Complex64::from_polar(
                    weight * (-s0.sigma * ln_n).exp(),
                    -s0.t * ln_n,
                ));
            }
            pk *= pf;
            k += 1;
        }
    }
    Ok(acc.value())
}

/// `Re Σ_{lo < p <= hi} p^{-s}` over primes only.
pub fn prime_sum(s0: SPoint, lo: f64, hi: f64, table: &PrimeTable) -> Result<f64> {
    if !(lo < hi) {
        return Err(domain!("prime_sum needs lo < hi, got ({lo}, {hi})"));
    }
    table.check_covers(hi)?;
    let mut acc = NeumaierSum::new();
    for &p in table.primes_in(lo, hi) {
        let lp = (p as f64).ln();
        acc.add((-s0.sigma * lp).exp() * (s0.t * lp).cos());
    }
    Ok(acc.value())
}

/// Precomputed `(log p, p^{-σ})` for repeated prime sums at fixed `σ`.
#[derive(Debug, Clone)]
pub struct PrimeWeights {
    pub(crate) logs: Vec<f64>,
    pub(crate) amps: Vec<f64>,
    pub(crate) primes: Vec<u32>,
}

impl PrimeWeights {
    pub fn new(sigma: f64, hi: f64, table: &PrimeTable) -> Result<Self> {
        table.check_covers(hi)?;
        let primes: Vec<u32> = table.primes_in(0.0, hi).to_vec();
        let logs: Vec<f64> = primes.iter().map(|&p| (p as f64).ln()).collect();
        let amps = logs.iter().map(|&l| (-sigma * l).exp()).collect();
        Ok(Self { logs, amps, primes })
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    /// Number of primes `<= bound`.
    pub fn count_upto(&self, bound: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= bound)
    }

    /// `Re Σ p^{-σ-it}` over the primes with index in `range`.
    pub fn real_sum(&self, t: f64, range: std::ops::Range<usize>) -> f64 {
        let mut acc = NeumaierSum::new();
        for i in range {
            acc.add(self.amps[i] * (t * self.logs[i]).cos());
        }
        acc.value()
    }
}

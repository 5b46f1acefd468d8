//! Even and odd moments of `Re Σ_{p<=X} p^{-σ₀-iτ}`: the closed-form main
//! term, the exact expectation under independent uniform phases, and
//! averages over a uniform `τ`-grid on `[T, 2T]`.

use crate::chain::PrimeWeights;
use crate::error::{domain, Result};
use crate::number_theory::{prime_variance, PrimeTable};
use crate::summation::NeumaierSum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Runs where the `X^{4k}/T` term exceeds this fraction of the main term
/// are outside the regime where the moment formula says anything.
pub const REGIME_TOLERANCE: f64 = 0.1;

/// Default trapezoid node count on `[T, 2T]`; a spacing of `T/4e6` keeps
/// every frequency `Σ ±log p` with up to four primes `<= 100` below Nyquist
/// at `T = 1e6`.
pub const DEFAULT_GRID_NODES: usize = 4_000_001;
pub const MIN_GRID_NODES: usize = 200_000;

const BLOCK: usize = 1 << 16;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `2^{-k} (2k)!/k! · V^k` with `V = ½ Σ_{p<=X} p^{-2σ₀}`.
pub fn closed_form_moment(k: u32, x: f64, sigma0: f64, table: &PrimeTable) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let v = prime_variance(x, sigma0, table)?;
    Ok(gaussian_factor(k) * v.powi(k as i32))
}

/// `(2k)!/(k! 2^k)`, the `2k`-th moment of a standard normal.
fn gaussian_factor(k: u32) -> f64 {
    factorial(2 * k) / factorial(k) / 2f64.powi(k as i32)
}

/// Sizes of the error terms the closed form leaves out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentErrorTerms {
    pub main: f64,
    /// `V^{k-2}`; not applicable for `k = 1`.
    pub correction: Option<f64>,
    /// `X^{4k}/T`.
    pub regime: f64,
    /// `regime > REGIME_TOLERANCE · main`.
    pub invalid_regime: bool,
}

pub fn moment_error_terms(
    k: u32,
    x: f64,
    sigma0: f64,
    t: f64,
    table: &PrimeTable,
) -> Result<MomentErrorTerms> {
    if k == 0 {
        return Err(domain!("error terms need k >= 1"));
    }
    let v = prime_variance(x, sigma0, table)?;
    let main = gaussian_factor(k) * v.powi(k as i32);
    let regime = x.powf(4.0 * k as f64) / t;
    Ok(MomentErrorTerms {
        main,
        correction: (k >= 2).then(|| v.powi(k as i32 - 2)),
        regime,
        invalid_regime: regime > REGIME_TOLERANCE * main,
    })
}

/// `E[(Σ_{p<=X} p^{-σ₀} cos θ_p)^m]` for independent uniform `θ_p`.
///
/// The moment generating function factors over primes, with
/// `E exp(z a cos θ) = Σ_j (a z / 2)^{2j} / (j!)²`; multiplying these
/// series truncated at degree `m` gives the exact moment. Odd `m` is 0.
pub fn random_phase_power_moment(m: u32, x: f64, sigma0: f64, table: &PrimeTable) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    if !(x > 0.0) {
        return Err(domain!("random-phase moment needs X > 0, got {x}"));
    }
    table.check_covers(x)?;
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let half = (m / 2) as usize;
    // coefficient of z^{2i}, i = 0..=half
    let mut coef: Vec<NeumaierSum> = (0..=half).map(|_| NeumaierSum::new()).collect();
    coef[0].add(1.0);
    let mut b = vec![0.0; half + 1];
    for &p in table.primes_in(0.0, x) {
        let quarter_a2 = 0.25 * (p as f64).powf(-2.0 * sigma0);
        b[0] = 1.0;
        for j in 1..=half {
            b[j] = b[j - 1] * quarter_a2 / (j * j) as f64;
        }
        for i in (1..=half).rev() {
            for j in 1..=i {
                let prev = coef[i - j].value();
                coef[i].add(prev * b[j]);
            }
        }
    }
    Ok(factorial(m) * coef[half].value())
}

/// `E[(Re Σ_{p<=X} p^{-σ₀} e^{-iθ_p})^{2k}]` for independent uniform phases.
pub fn random_phase_moment(k: u32, x: f64, sigma0: f64, table: &PrimeTable) -> Result<f64> {
    random_phase_power_moment(2 * k, x, sigma0, table)
}

/// Mean of `x^k`.
pub fn empirical_moment(samples: &[f64], k: u32) -> Result<f64> {
    if samples.is_empty() {
        return Err(domain!("empirical moment of an empty sample"));
    }
    let s: NeumaierSum = samples.iter().map(|x| x.powi(k as i32)).sum();
    Ok(s.value() / samples.len() as f64)
}

/// Standard error of [`empirical_moment`] treating samples as independent.
pub fn moment_standard_error(samples: &[f64], k: u32) -> Result<f64> {
    let m = empirical_moment(samples, k)?;
    let m2 = empirical_moment(samples, 2 * k)?;
    Ok(((m2 - m * m).max(0.0) / samples.len() as f64).sqrt())
}

/// Trapezoid averages of `S(τ)^m`, `m = 0..=max_power`, with
/// `S(τ) = Re Σ_{p<=X} p^{-σ₀-iτ}` on `nodes` equispaced points of `[T, 2T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMoments {
    pub x: f64,
    pub sigma0: f64,
    pub t: f64,
    pub nodes: usize,
    /// `moments[m]` is the average of `S^m`.
    pub moments: Vec<f64>,
}

impl GridMoments {
    pub fn compute(
        x: f64,
        sigma0: f64,
        t: f64,
        nodes: usize,
        max_power: u32,
        table: &PrimeTable,
    ) -> Result<Self> {
        if nodes < MIN_GRID_NODES {
            return Err(domain!(
                "moment quadrature needs >= {MIN_GRID_NODES} nodes, got {nodes}"
            ));
        }
        if !(t > 0.0) {
            return Err(domain!("moment quadrature needs T > 0, got {t}"));
        }
        let w = PrimeWeights::new(sigma0, x, table)?;
        if w.is_empty() {
            return Err(domain!("no primes <= X = {x}"));
        }
        let h = t / (nodes - 1) as f64;
        let np = max_power as usize + 1;
        let blocks: Vec<Vec<f64>> = (0..nodes.div_ceil(BLOCK))
            .into_par_iter()
            .map(|b| {
                let mut acc: Vec<NeumaierSum> = (0..np).map(|_| NeumaierSum::new()).collect();
                for i in b * BLOCK..((b + 1) * BLOCK).min(nodes) {
                    let weight = if i == 0 || i == nodes - 1 { 0.5 } else { 1.0 };
                    let s = w.real_sum(t + i as f64 * h, 0..w.len());
                    let mut pow = weight;
                    for a in acc.iter_mut() {
                        a.add(pow);
                        pow *= s;
                    }
                }
                acc.iter().map(NeumaierSum::value).collect()
            })
            .collect();
        // fixed-order reduction over blocks
        let mut total: Vec<NeumaierSum> = (0..np).map(|_| NeumaierSum::new()).collect();
        for block in &blocks {
            for (t, v) in total.iter_mut().zip(block) {
                t.add(*v);
            }
        }
        let norm = (nodes - 1) as f64;
        Ok(Self {
            x,
            sigma0,
            t,
            nodes,
            moments: total.iter().map(|s| s.value() / norm).collect(),
        })
    }

    pub fn moment(&self, m: u32) -> Option<f64> {
        self.moments.get(m as usize).copied()
    }

    /// Standard error of the `m`-th moment, treating nodes as independent
    /// draws; needs `2m <= max_power`.
    pub fn standard_error(&self, m: u32) -> Option<f64> {
        let mean = self.moment(m)?;
        let sq = self.moment(2 * m)?;
        Some(((sq - mean * mean).max(0.0) / self.nodes as f64).sqrt())
    }
}

/// Three-way comparison at one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub k: u32,
    pub closed_form: f64,
    pub random_phase: f64,
    pub empirical: f64,
    /// `|empirical - closed_form| / closed_form`.
    pub gap_cf_emp: f64,
    /// `|random_phase - closed_form| / closed_form`.
    pub gap_rp_cf: f64,
    pub n: usize,
    #[serde(skip)]
    pub errors: Option<MomentErrorTerms>,
}

impl MomentReport {
    pub fn invalid_regime(&self) -> bool {
        self.errors.is_some_and(|e| e.invalid_regime)
    }
}

/// Builds the report for `k` from precomputed grid moments.
pub fn moment_report(k: u32, grid: &GridMoments, table: &PrimeTable) -> Result<MomentReport> {
    if k == 0 {
        return Err(domain!("moment report needs k >= 1"));
    }
    let empirical = grid
        .moment(2 * k)
        .ok_or_else(|| domain!("grid moments stop below power {}", 2 * k))?;
    let closed_form = closed_form_moment(k, grid.x, grid.sigma0, table)?;
    let random_phase = random_phase_moment(k, grid.x, grid.sigma0, table)?;
    Ok(MomentReport {
        k,
        closed_form,
        random_phase,
        empirical,
        gap_cf_emp: (empirical - closed_form).abs() / closed_form,
        gap_rp_cf: (random_phase - closed_form).abs() / closed_form,
        n: grid.nodes,
        errors: Some(moment_error_terms(k, grid.x, grid.sigma0, grid.t, table)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::sieve_primes;

    fn table() -> PrimeTable {
        sieve_primes(1000).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let t = table();
        assert_eq!(closed_form_moment(0, 100.0, 0.5, &t).unwrap(), 1.0);
        let v = prime_variance(100.0, 0.5, &t).unwrap();
        assert!((closed_form_moment(1, 100.0, 0.5, &t).unwrap() - 0.901409).abs() < 1e-6);
        assert!((closed_form_moment(2, 100.0, 0.5, &t).unwrap() - 3.0 * v * v).abs() < 1e-14);
        assert!((closed_form_moment(2, 100.0, 0.5, &t).unwrap() - 2.437612).abs() < 1e-5);
        assert!((closed_form_moment(1, 2.0, 0.5, &t).unwrap() - 0.25).abs() < 1e-15);
        assert!((closed_form_moment(3, 2.0, 0.5, &t).unwrap() - 15.0 / 64.0).abs() < 1e-15);
    }

    #[test]
    fn random_phase_k1_is_variance() {
        let t = table();
        for &(x, s) in &[(100.0, 0.5), (6.0, 0.5), (997.0, 0.5724), (2.0, 1.0)] {
            assert_eq!(
                random_phase_moment(1, x, s, &t).unwrap(),
                prime_variance(x, s, &t).unwrap()
            );
        }
    }

    #[test]
    fn random_phase_k2_by_hand() {
        let t = table();
        let a2: Vec<f64> = [2.0f64, 3.0, 5.0].iter().map(|p| 1.0 / p).collect();
        let s2: f64 = a2.iter().sum();
        let s4: f64 = a2.iter().map(|x| x * x).sum();
        let hand = 3.0 * (s2 / 2.0).powi(2) - 0.375 * s4;
        let got = random_phase_moment(2, 6.0, 0.5, &t).unwrap();
        assert!((got - hand).abs() < 1e-12, "{got} vs {hand}");
    }

    #[test]
    fn random_phase_single_prime() {
        // a^{2k} E cos^{2k} = a^{2k} C(2k, k)/4^k
        let t = table();
        let a = 2f64.powf(-0.6);
        for k in 1..6u32 {
            let want = a.powi(2 * k as i32) * factorial(2 * k)
                / factorial(k).powi(2)
                / 4f64.powi(k as i32);
            let got = random_phase_moment(k, 2.0, 0.6, &t).unwrap();
            assert!((got - want).abs() < 1e-14 * want.max(1.0));
        }
        assert_eq!(random_phase_power_moment(5, 100.0, 0.5, &t).unwrap(), 0.0);
        assert_eq!(random_phase_power_moment(0, 100.0, 0.5, &t).unwrap(), 1.0);
    }

    #[test]
    fn random_phase_below_gaussian_for_k_ge_2() {
        // bounded phases have lighter tails, and the gap is bounded by the
        // correction magnitude relative to the main term
        let t = table();
        for k in 2..=3 {
            let cf = closed_form_moment(k, 100.0, 0.5, &t).unwrap();
            let rp = random_phase_moment(k, 100.0, 0.5, &t).unwrap();
            assert!(rp < cf);
            let e = moment_error_terms(k, 100.0, 0.5, 1e6, &t).unwrap();
            let v = prime_variance(100.0, 0.5, &t).unwrap();
            assert!((cf - rp) / cf <= e.correction.unwrap() / v.powi(k as i32));
        }
    }

    #[test]
    fn empirical_basics() {
        assert!((empirical_moment(&[1.5; 10], 2).unwrap() - 2.25).abs() < 1e-15);
        assert_eq!(empirical_moment(&[1.0, -1.0, 1.0, -1.0], 1).unwrap(), 0.0);
        assert!(empirical_moment(&[], 2).is_err());
        assert_eq!(moment_standard_error(&[2.0; 5], 1).unwrap(), 0.0);
    }

    #[test]
    fn regime_flags() {
        let t = table();
        let e1 = moment_error_terms(1, 100.0, 0.5 + 1.0 / 1e6f64.ln(), 1e6, &t).unwrap();
        assert!(e1.correction.is_none());
        let e3 = moment_error_terms(3, 100.0, 0.5 + 1.0 / 1e6f64.ln(), 1e6, &t).unwrap();
        assert!(e3.invalid_regime);
        assert!((e3.regime - 1e18).abs() < 1e3);
        let small = moment_error_terms(1, 5.0, 0.6, 1e12, &t).unwrap();
        assert!(!small.invalid_regime);
    }

    #[test]
    fn grid_quadrature_small() {
        // X = 3: S = 2^{-σ} cos(τ log 2) + 3^{-σ} cos(τ log 3); mean of S² → V
        let t = table();
        let g = GridMoments::compute(3.0, 0.5, 1e5, MIN_GRID_NODES, 4, &t).unwrap();
        let v = prime_variance(3.0, 0.5, &t).unwrap();
        assert!((g.moments[0] - 1.0).abs() < 1e-12);
        assert!((g.moment(2).unwrap() - v).abs() < 1e-4);
        assert!(g.moment(1).unwrap().abs() < 3.0 * g.standard_error(1).unwrap() + 1e-5);
        let r = moment_report(1, &g, &t).unwrap();
        assert!((r.gap_cf_emp - (r.empirical - r.closed_form).abs() / r.closed_form).abs() < 1e-12);
        assert!(moment_report(3, &g, &t).is_err());
        assert!(GridMoments::compute(3.0, 0.5, 1e5, 1000, 4, &t).is_err());
    }

    #[test]
    fn report_json_field_names() {
        let t = table();
        let g = GridMoments::compute(3.0, 0.5, 1e5, MIN_GRID_NODES, 2, &t).unwrap();
        let r = moment_report(1, &g, &t).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "closed_form",
                "empirical",
                "gap_cf_emp",
                "gap_rp_cf",
                "k",
                "n",
                "random_phase"
            ]
        );
    }
}

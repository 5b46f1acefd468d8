//! Euler–Maclaurin evaluation of ζ(s) and ζ'(s) for Re(s) >= 0.4.

use crate::error::{config, domain, Result};
use crate::summation::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SPoint;

/// Smallest real part the engine accepts.
pub const MIN_SIGMA: f64 = 0.4;
/// Largest supported correction depth `M` (uses `B_{2M+2}` in the bound).
pub const MAX_BERNOULLI_ORDER: u32 = 20;
/// Default height cap for ζ evaluation.
pub const DEFAULT_HEIGHT_CAP: f64 = 2.0e7;

const MIN_TERMS: u64 = 20;

/// Magnitudes below this are treated as numerical zeros of ζ.
pub const LOG_FLOOR: f64 = 1e-300;

// B_2, B_4, ..., B_42.
const BERNOULLI: [f64; 21] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
    1520097643918070802691.0 / 1806.0,
];

/// `B_{2k} / (2k)!` for `k = 1..=21`.
fn bernoulli_ratio(k: usize) -> f64 {
    let mut fact = 1.0f64;
    for j in 1..=(2 * k) {
        fact *= j as f64;
    }
    BERNOULLI[k - 1] / fact
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EMConfig {
    /// Number of directly summed terms `N`.
    pub terms: u64,
    /// Correction depth `M`.
    pub bernoulli_order: u32,
    /// Largest acceptable error bound on a returned value.
    pub error_budget: f64,
    pub height_cap: f64,
}

impl Default for EMConfig {
    fn default() -> Self {
        Self {
            terms: 0,
            bernoulli_order: 10,
            error_budget: 1e-6,
            height_cap: DEFAULT_HEIGHT_CAP,
        }
    }
}

impl EMConfig {
    /// Minimal-cost config valid for `1/2 <= σ <= 4` and `|t| <= height`.
    pub fn for_height(height: f64) -> Self {
        let mut cfg = Self::default();
        let h = height.abs();
        cfg.terms = cfg
            .required_terms(SPoint::new(0.5, h))
            .max(cfg.required_terms(SPoint::new(4.0, h)));
        cfg
    }

    pub fn with_terms(mut self, terms: u64) -> Self {
        self.terms = terms;
        self
    }

    pub fn with_bernoulli_order(mut self, order: u32) -> Self {
        self.bernoulli_order = order;
        self
    }

    /// Terms needed at `s`: at least `|t|/π`, enough that successive
    /// Bernoulli corrections shrink by 4x or more at the configured depth,
    /// and enough to bring the remainder bound under the error budget.
    pub fn required_terms(&self, s: SPoint) -> u64 {
        let by_height = (s.t.abs() / std::f64::consts::PI).ceil() as u64;
        let modulus = s.sigma.hypot(s.t);
        let by_order = ((modulus + 2.0 * self.bernoulli_order as f64 + 3.0) / std::f64::consts::PI)
            .ceil() as u64;
        let mut n = by_height.max(by_order).max(MIN_TERMS);
        let m = self.bernoulli_order as usize;
        while remainder_bound(s, m, n as f64) > self.error_budget {
            n += n / 16 + 1;
        }
        n
    }

    pub fn validate(&self) -> Result<()> {
        if self.bernoulli_order == 0 || self.bernoulli_order > MAX_BERNOULLI_ORDER {
            return Err(config!(
                "bernoulli_order must be in 1..={MAX_BERNOULLI_ORDER}, got {}",
                self.bernoulli_order
            ));
        }
        if !(self.error_budget > 0.0) {
            return Err(config!("error_budget must be positive"));
        }
        Ok(())
    }

    pub(crate) fn check(&self, s: SPoint) -> Result<()> {
        self.validate()?;
        if !(s.sigma >= MIN_SIGMA) || !s.t.is_finite() {
            return Err(domain!(
                "zeta engine supports sigma >= {MIN_SIGMA} and finite t, got {s}"
            ));
        }
        if s.sigma == 1.0 && s.t == 0.0 {
            return Err(domain!("s = 1 is the pole of zeta"));
        }
        if s.t.abs() > self.height_cap {
            return Err(config!(
                "height |t| = {} exceeds the zeta height cap {}",
                s.t.abs(),
                self.height_cap
            ));
        }
        let need = self.required_terms(s);
        if self.terms < need {
            return Err(config!(
                "Euler-Maclaurin needs at least {need} terms at {s}, config has {}",
                self.terms
            ));
        }
        Ok(())
    }
}

/// A ζ value with its attached error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: Complex64,
    /// Bound on the Euler–Maclaurin remainder.
    pub truncation_bound: f64,
    /// Worst-case floating-point accumulation bound.
    pub rounding_bound: f64,
}

impl ZetaValue {
    pub fn error_bound(&self) -> f64 {
        self.truncation_bound + self.rounding_bound
    }
}

/// ζ and ζ' at the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaWithDerivative {
    pub zeta: ZetaValue,
    pub derivative: Complex64,
    pub derivative_bound: f64,
}

/// Cached `ln n` table for repeated evaluations with the same `N`.
#[derive(Debug, Clone)]
pub struct ZetaKernel {
    cfg: EMConfig,
    logs: Vec<f64>,
}

impl ZetaKernel {
    pub fn new(cfg: EMConfig) -> Result<Self> {
        cfg.validate()?;
        let logs = (0..cfg.terms).map(|n| (n.max(1) as f64).ln()).collect();
        Ok(Self { cfg, logs })
    }

    pub fn config(&self) -> &EMConfig {
        &self.cfg
    }

    pub fn zeta(&self, s: SPoint) -> Result<ZetaValue> {
        self.cfg.check(s)?;
        let mut out = [ZetaValue::default_zero(); 1];
        evaluate(&[s.sigma], s.t, &self.cfg, Some(&self.logs), &mut out, None);
        budget(&self.cfg, out[0])
    }

    /// ζ at several real parts on the same horizontal line, sharing phases.
    pub fn zeta_on_line(&self, sigmas: &[f64], t: f64) -> Result<Vec<ZetaValue>> {
        for &sigma in sigmas {
            self.cfg.check(SPoint::new(sigma, t))?;
        }
        let mut out = vec![ZetaValue::default_zero(); sigmas.len()];
        evaluate(sigmas, t, &self.cfg, Some(&self.logs), &mut out, None);
        out.into_iter().map(|v| budget(&self.cfg, v)).collect()
    }
}

impl ZetaValue {
    fn default_zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            truncation_bound: 0.0,
            rounding_bound: 0.0,
        }
    }
}

fn budget(cfg: &EMConfig, v: ZetaValue) -> Result<ZetaValue> {
    if v.truncation_bound > cfg.error_budget {
        return Err(config!(
            "Euler-Maclaurin remainder bound {:.3e} exceeds error budget {:.3e}; raise terms or bernoulli_order",
            v.truncation_bound,
            cfg.error_budget
        ));
    }
    Ok(v)
}

/// ζ(s) by Euler–Maclaurin summation.
pub fn zeta(s: SPoint, cfg: &EMConfig) -> Result<ZetaValue> {
    cfg.check(s)?;
    let mut out = [ZetaValue::default_zero(); 1];
    evaluate(&[s.sigma], s.t, cfg, None, &mut out, None);
    budget(cfg, out[0])
}

/// `log|ζ(s)|`, or `None` when `|ζ(s)|` is below [`LOG_FLOOR`].
pub fn log_abs_zeta(s: SPoint, cfg: &EMConfig) -> Result<Option<f64>> {
    Ok(log_abs(zeta(s, cfg)?.value))
}

pub(crate) fn log_abs(z: Complex64) -> Option<f64> {
    let m = z.norm();
    (m > LOG_FLOOR).then(|| m.ln())
}

pub fn zeta_and_derivative(s: SPoint, cfg: &EMConfig) -> Result<ZetaWithDerivative> {
    cfg.check(s)?;
    let mut out = [ZetaValue::default_zero(); 1];
    let mut deriv = [(Complex64::new(0.0, 0.0), 0.0); 1];
    evaluate(&[s.sigma], s.t, cfg, None, &mut out, Some(&mut deriv));
    let zeta = budget(cfg, out[0])?;
    Ok(ZetaWithDerivative {
        zeta,
        derivative: deriv[0].0,
        derivative_bound: deriv[0].1,
    })
}

/// Logarithmic derivative `ζ'/ζ(s)` together with a relative error bound.
pub fn zeta_log_deriv(s: SPoint, cfg: &EMConfig) -> Result<(Complex64, f64)> {
    let zd = zeta_and_derivative(s, cfg)?;
    let z = zd.zeta.value;
    if z.norm() <= LOG_FLOOR {
        return Err(domain!("zeta vanishes numerically at {s}"));
    }
    let ratio = zd.derivative / z;
    let rel = zd.derivative_bound / zd.derivative.norm().max(f64::MIN_POSITIVE)
        + zd.zeta.error_bound() / z.norm();
    Ok((ratio, rel))
}

/// Core summation. Phases `t ln n` are shared between all requested real
/// parts; the derivative is only produced for a single sigma.
/// `|s(s+1)...(s+2M+1) B_{2M+2} N^{-σ-2M-1} / ((2M+2)! (σ+2M+1))|`,
/// accumulated in log space so large heights and depths do not overflow.
fn remainder_bound(s: SPoint, m: usize, n: f64) -> f64 {
    let sc = s.to_complex();
    let log_poch: f64 = (0..=2 * m + 1).map(|i| (sc + i as f64).norm().ln()).sum();
    let tail = s.sigma + (2 * m + 1) as f64;
    (log_poch - tail * n.ln()).exp() * bernoulli_ratio(m + 1).abs() / tail
}

fn evaluate(
    sigmas: &[f64],
    t: f64,
    cfg: &EMConfig,
    logs: Option<&[f64]>,
    out: &mut [ZetaValue],
    mut deriv: Option<&mut [(Complex64, f64)]>,
) {
    let n_terms = cfg.terms;
    let m = cfg.bernoulli_order as usize;
    let k = sigmas.len();
    debug_assert!(deriv.is_none() || k == 1);

    let mut sums = vec![ComplexSum::new(); k];
    let mut abs_sums = vec![0.0f64; k];
    let mut abs_log_sums = vec![0.0f64; k];
    let mut dsum = ComplexSum::new();
    let want_deriv = deriv.is_some();

    for n in 1..n_terms {
        let ln = match logs {
            Some(l) => l[n as usize],
            None => (n as f64).ln(),
        };
        let (sin, cos) = (t * ln).sin_cos();
        for j in 0..k {
            let mag = (-sigmas[j] * ln).exp();
            let term = Complex64::new(mag * cos, -mag * sin);
            sums[j].add(term);
            abs_sums[j] += mag;
            abs_log_sums[j] += mag * ln;
            if want_deriv && j == 0 {
                dsum.add(-term * ln);
            }
        }
    }

    let nf = n_terms as f64;
    let ln_n = nf.ln();
    for j in 0..k {
        let s = Complex64::new(sigmas[j], t);
        let n_pow_neg_s = (-s * ln_n).exp();
        let pole = n_pow_neg_s * nf / (s - 1.0);
        let half = 0.5 * n_pow_neg_s;
        let mut total = sums[j].value() + pole + half;

        // corrections B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
        let mut poch = s; // s (s+1) ... (s+2k-2)
        let mut npow = n_pow_neg_s / nf; // N^{-s-2k+1}
        let mut dcorr = Complex64::new(0.0, 0.0);
        let mut inv_sum = 1.0 / s; // Σ_{i=0}^{2k-2} 1/(s+i)
        let mut corr_abs = 0.0;
        for kk in 1..=m {
            if kk > 1 {
                let a = s + (2 * kk - 3) as f64;
                let b = s + (2 * kk - 2) as f64;
                poch *= a * b;
                inv_sum += 1.0 / a + 1.0 / b;
                npow /= nf * nf;
            }
            let c = poch * npow * bernoulli_ratio(kk);
            total += c;
            corr_abs += c.norm();
            if want_deriv {
                dcorr += c * (inv_sum - ln_n);
            }
        }

        let trunc = remainder_bound(SPoint::new(sigmas[j], t), m, nf);

        let eps = f64::EPSILON;
        let tail_abs = pole.norm() + half.norm() + corr_abs;
        let rounding =
            eps * (8.0 * (abs_sums[j] + tail_abs) + t.abs() * (abs_log_sums[j] + ln_n * tail_abs));

        out[j] = ZetaValue {
            value: total,
            truncation_bound: trunc,
            rounding_bound: rounding,
        };

        if let Some(d) = deriv.as_deref_mut() {
            let dpole = pole * (-ln_n - 1.0 / (s - 1.0));
            let dhalf = -half * ln_n;
            let dvalue = dsum.value() + dpole + dhalf + dcorr;
            let dtrunc = trunc * (ln_n + (2 * m + 2) as f64);
            let drounding = rounding * (1.0 + ln_n);
            d[0] = (dvalue, dtrunc + drounding);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg_at(t: f64) -> EMConfig {
        EMConfig::for_height(t)
    }

    #[test]
    fn basel() {
        let z = zeta(SPoint::new(2.0, 0.0), &cfg_at(0.0)).unwrap();
        assert!((z.value.re - PI * PI / 6.0).abs() < 1e-12);
        assert!(z.value.im.abs() < 1e-15);
        assert!(z.error_bound() < 1e-10);
        let l = log_abs_zeta(SPoint::new(2.0, 0.0), &cfg_at(0.0))
            .unwrap()
            .unwrap();
        assert!((l - (PI * PI / 6.0).ln()).abs() < 1e-12);
        assert!((l - 0.497700302).abs() < 1e-8);
    }

    #[test]
    fn known_values() {
        // ζ(4) = π^4/90, ζ(3) Apéry
        let z4 = zeta(SPoint::new(4.0, 0.0), &cfg_at(0.0)).unwrap().value.re;
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-13);
        let z3 = zeta(SPoint::new(3.0, 0.0), &cfg_at(0.0)).unwrap().value.re;
        assert!((z3 - 1.202_056_903_159_594_2).abs() < 1e-13);
    }

    #[test]
    fn half_on_real_axis_self_consistent() {
        let s = SPoint::new(0.5, 0.0);
        let base = cfg_at(0.0);
        let a = zeta(s, &base.with_terms(50)).unwrap();
        let b = zeta(s, &base.with_terms(100)).unwrap();
        assert!((a.value - b.value).norm() < 1e-9);
        assert!((a.value.re + 1.4603545).abs() < 1e-7);
    }

    #[test]
    fn near_first_zero() {
        let s = SPoint::new(0.5, 14.134725);
        let z = zeta(s, &cfg_at(20.0)).unwrap();
        assert!(z.value.norm() < 1e-4, "{}", z.value.norm());
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = cfg_at(100.0);
        assert!(matches!(
            zeta(SPoint::new(1.0, 0.0), &cfg),
            Err(crate::Error::Domain(_))
        ));
        assert!(zeta(SPoint::new(0.3, 5.0), &cfg).is_err());
        match zeta(SPoint::new(0.5, 1000.0), &cfg) {
            Err(crate::Error::Config(msg)) => assert!(msg.contains("needs at least"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let bad = cfg.with_bernoulli_order(21);
        assert!(zeta(SPoint::new(2.0, 0.0), &bad).is_err());
        let capped = EMConfig {
            height_cap: 50.0,
            ..cfg
        };
        assert!(zeta(SPoint::new(0.5, 60.0), &capped).is_err());
    }

    #[test]
    fn truncation_bound_monotone() {
        let s = SPoint::new(0.6, 300.0);
        let base = cfg_at(300.0);
        let mut prev = f64::INFINITY;
        for terms in [base.terms, base.terms * 2, base.terms * 4] {
            let b = zeta(s, &base.with_terms(terms)).unwrap().truncation_bound;
            assert!(b <= prev);
            prev = b;
        }
        // same N for every depth
        let n = (1..=MAX_BERNOULLI_ORDER)
            .map(|o| base.with_bernoulli_order(o).required_terms(s))
            .max()
            .unwrap();
        let mut prev = f64::INFINITY;
        for order in 1..=MAX_BERNOULLI_ORDER {
            let cfg = base.with_bernoulli_order(order).with_terms(n);
            let b = zeta(s, &cfg)
                .map(|z| z.truncation_bound)
                .unwrap_or(f64::INFINITY);
            assert!(b <= prev * (1.0 + 1e-12), "order {order}: {b} > {prev}");
            prev = b;
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        // central difference along sigma is the complex derivative
        for &(sigma, t, tol) in &[(2.0, 0.0, 1e-8), (3.0, 0.0, 1e-8), (0.9, 50.0, 1e-6)] {
            let cfg = cfg_at(t + 1.0);
            let s = SPoint::new(sigma, t);
            let h = 1e-5;
            let zp = zeta(SPoint::new(sigma + h, t), &cfg).unwrap().value;
            let zm = zeta(SPoint::new(sigma - h, t), &cfg).unwrap().value;
            let fd = (zp - zm) / (2.0 * h);
            let (ld, _) = zeta_log_deriv(s, &cfg).unwrap();
            let z = zeta(s, &cfg).unwrap().value;
            let oracle = fd / z;
            assert!((ld - oracle).norm() < tol, "{s}: {ld} vs {oracle}");
        }
        let (ld2, _) = zeta_log_deriv(SPoint::new(2.0, 0.0), &cfg_at(0.0)).unwrap();
        assert!((ld2.re + 0.569961).abs() < 1e-6);
    }

    #[test]
    fn kernel_matches_free_function() {
        let cfg = cfg_at(2000.0);
        let kernel = ZetaKernel::new(cfg).unwrap();
        let t = 1234.5;
        let both = kernel.zeta_on_line(&[0.5, 0.6], t).unwrap();
        for (sigma, v) in [0.5, 0.6].iter().zip(&both) {
            let free = zeta(SPoint::new(*sigma, t), &cfg).unwrap();
            assert_eq!(free.value, v.value);
        }
    }
}

use super::bl::bl_chain;
use super::{signed_difference, EmpiricalMeasure};
use crate::error::{domain, Result};
use crate::summation::NeumaierSum;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

pub const MIN_QUANTIZATION: usize = 100;

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal parameters are valid")
}

/// The standard normal discretized into `N` equal-mass atoms at the
/// `(k - ½)/N` quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianRef {
    quantization: usize,
}

impl GaussianRef {
    pub fn new(quantization: usize) -> Result<Self> {
        if quantization < MIN_QUANTIZATION {
            return Err(domain!(
                "Gaussian quantization N = {quantization} below minimum {MIN_QUANTIZATION}"
            ));
        }
        Ok(Self { quantization })
    }

    pub fn quantization(&self) -> usize {
        self.quantization
    }

    pub fn measure(&self) -> EmpiricalMeasure {
        let n = self.quantization as f64;
        let g = std_normal();
        let atoms: Vec<f64> = (1..=self.quantization)
            .map(|k| g.inverse_cdf((k as f64 - 0.5) / n))
            .collect();
        EmpiricalMeasure::from_weighted(&atoms, &vec![1.0; atoms.len()])
            .expect("quantiles are finite")
    }

    /// `W₁(𝒵, G_N)`, in closed form cell by cell. Bounds the change in any
    /// bounded-Lipschitz distance caused by the discretization.
    pub fn discretization_error(&self) -> f64 {
        let n = self.quantization as f64;
        let g = std_normal();
        // H(x) = ∫^x (y - q) φ(y) dy = -φ(x) - q Φ(x)
        let h = |x: f64, cdf: f64, q: f64| {
            if x.is_infinite() {
                -q * cdf
            } else {
                -g.pdf(x) - q * cdf
            }
        };
        let mut total = NeumaierSum::new();
        for k in 1..=self.quantization {
            let (ua, ub, uq) = ((k - 1) as f64 / n, k as f64 / n, (k as f64 - 0.5) / n);
            let a = if k == 1 {
                f64::NEG_INFINITY
            } else {
                g.inverse_cdf(ua)
            };
            let b = if k == self.quantization {
                f64::INFINITY
            } else {
                g.inverse_cdf(ub)
            };
            let q = g.inverse_cdf(uq);
            total.add(h(a, ua, q) + h(b, ub, q) - 2.0 * h(q, uq, q));
        }
        total.value()
    }
}

/// Bounded-Lipschitz distance to the quantized standard normal.
///
/// The distance to the continuous normal differs by at most
/// [`GaussianRef::discretization_error`].
pub fn bl_distance_to_gaussian(mu: &EmpiricalMeasure, reference: &GaussianRef) -> f64 {
    let g = reference.measure();
    let (pos, diff) = signed_difference(mu, &g);
    bl_chain(&pos, &diff)
}

/// `sup_x |F_μ(x) - F_ν(x)|`.
pub fn kolmogorov_distance(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> f64 {
    let (_, diff) = signed_difference(mu, nu);
    let mut cum = NeumaierSum::new();
    let mut best: f64 = 0.0;
    for d in diff {
        cum.add(d);
        best = best.max(cum.value().abs());
    }
    best
}

/// `sup_x |F_μ(x) - Φ(x)|` against the exact normal CDF, checking both
/// one-sided limits at every atom.
pub fn kolmogorov_to_gaussian(mu: &EmpiricalMeasure) -> f64 {
    let g = std_normal();
    let mut below = NeumaierSum::new();
    let mut best: f64 = 0.0;
    for (&a, &w) in mu.atoms().iter().zip(mu.weights()) {
        let phi = g.cdf(a);
        let before = below.value();
        below.add(w);
        best = best
            .max((phi - before).abs())
            .max((below.value() - phi).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::bl_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_samples(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn quantization_floor() {
        assert!(GaussianRef::new(99).is_err());
        assert!(GaussianRef::new(100).is_ok());
    }

    #[test]
    fn quantized_measure_is_symmetric() {
        let m = GaussianRef::new(1000).unwrap().measure();
        assert_eq!(m.len(), 1000);
        assert!(m.mean().abs() < 1e-12);
        for (a, b) in m.atoms().iter().zip(m.atoms().iter().rev()) {
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn self_distance_is_zero() {
        let r = GaussianRef::new(500).unwrap();
        assert_eq!(bl_distance_to_gaussian(&r.measure(), &r), 0.0);
    }

    #[test]
    fn dirac_at_zero() {
        let r = GaussianRef::new(10_000).unwrap();
        let d = bl_distance_to_gaussian(&EmpiricalMeasure::dirac(0.0).unwrap(), &r);
        assert!((0.7..=0.9).contains(&d), "{d}");
        // f(x) = min(|x| - 1, 1) is optimal, so d = E min(|𝒵|, 2)
        let g = std_normal();
        let exact = 2.0 * (g.pdf(0.0) - g.pdf(2.0)) + 4.0 * (1.0 - g.cdf(2.0));
        assert!(
            (d - exact).abs() <= r.discretization_error(),
            "{d} vs {exact}"
        );
    }

    #[test]
    fn discretization_error_shrinks() {
        let e1 = GaussianRef::new(100).unwrap().discretization_error();
        let e2 = GaussianRef::new(10_000).unwrap().discretization_error();
        assert!(e1 > 0.0 && e2 > 0.0 && e2 < e1 / 20.0, "{e1} {e2}");
        assert!(e2 < 1e-3);
    }

    #[test]
    fn normal_samples_are_close() {
        let r = GaussianRef::new(10_000).unwrap();
        let a = EmpiricalMeasure::from_samples(&normal_samples(100_000, 1)).unwrap();
        let b = EmpiricalMeasure::from_samples(&normal_samples(100_000, 2)).unwrap();
        assert!(bl_distance_to_gaussian(&a, &r) <= 0.02);
        assert!(bl_distance(&a, &b) <= 0.02);
        assert!(kolmogorov_to_gaussian(&a) <= 0.006);
    }

    #[test]
    fn kolmogorov_basics() {
        let z = EmpiricalMeasure::dirac(0.0).unwrap();
        let o = EmpiricalMeasure::dirac(1.0).unwrap();
        assert_eq!(kolmogorov_distance(&z, &o), 1.0);
        assert_eq!(kolmogorov_distance(&z, &z), 0.0);
        assert!((kolmogorov_to_gaussian(&z) - 0.5).abs() < 1e-15);
    }
}

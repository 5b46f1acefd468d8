//! Characteristic functions and the Fourier-side bound on test-function
//! differences.

use super::EmpiricalMeasure;
use crate::error::{domain, Result};
use crate::summation::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use rayon::prelude::*;

/// Values of a characteristic function on `points` equispaced nodes of
/// `[-xi_max, xi_max]`. The middle node is `ξ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CFGrid {
    pub xi_max: f64,
    pub points: usize,
    pub values: Vec<Complex64>,
}

fn check_grid(xi_max: f64, points: usize) -> Result<()> {
    if !(xi_max > 0.0 && xi_max.is_finite()) {
        return Err(domain!("CF grid needs xi_max > 0, got {xi_max}"));
    }
    if points < 3 || points % 2 == 0 {
        return Err(domain!(
            "CF grid needs an odd point count >= 3, got {points}"
        ));
    }
    Ok(())
}

impl CFGrid {
    pub fn node(&self, j: usize) -> f64 {
        node(self.xi_max, self.points, j)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    fn same_nodes(&self, other: &CFGrid) -> bool {
        self.points == other.points && self.xi_max == other.xi_max
    }

    /// `max_{|ξ| <= f} |self(ξ) - other(ξ)|` over shared nodes.
    pub fn sup_gap(&self, other: &CFGrid, f: f64) -> Result<f64> {
        if !self.same_nodes(other) {
            return Err(domain!(
                "CF grids differ: ({}, {}) vs ({}, {})",
                self.xi_max,
                self.points,
                other.xi_max,
                other.points
            ));
        }
        Ok((0..self.points)
            .filter(|&j| self.node(j).abs() <= f)
            .map(|j| (self.values[j] - other.values[j]).norm())
            .fold(0.0, f64::max))
    }
}

fn node(xi_max: f64, points: usize, j: usize) -> f64 {
    let mid = (points / 2) as f64;
    xi_max * (j as f64 - mid) / mid
}

/// `Σ_k w_k exp(iξ x_k)` at every grid node, in parallel over nodes.
pub fn empirical_cf(mu: &EmpiricalMeasure, xi_max: f64, points: usize) -> Result<CFGrid> {
    check_grid(xi_max, points)?;
    let mid = points / 2;
    let values = (0..points)
        .into_par_iter()
        .map(|j| {
            if j == mid {
                return Complex64::new(1.0, 0.0);
            }
            let xi = node(xi_max, points, j);
            let mut acc = ComplexSum::new();
            for (&a, &w) in mu.atoms().iter().zip(mu.weights()) {
                acc.add(Complex64::from_polar(w, xi * a));
            }
            acc.value()
        })
        .collect();
    Ok(CFGrid {
        xi_max,
        points,
        values,
    })
}

/// `e^{-ξ²/2}` on the same kind of grid.
pub fn gaussian_cf(xi_max: f64, points: usize) -> Result<CFGrid> {
    check_grid(xi_max, points)?;
    let values = (0..points)
        .map(|j| {
            let xi = node(xi_max, points, j);
            Complex64::new((-0.5 * xi * xi).exp(), 0.0)
        })
        .collect();
    Ok(CFGrid {
        xi_max,
        points,
        values,
    })
}

/// Mass outside the open interval `(-R, R)`.
pub fn tail_probability(mu: &EmpiricalMeasure, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain!("tail radius must be positive, got {r}"));
    }
    Ok(mu
        .atoms()
        .iter()
        .zip(mu.weights())
        .filter(|(a, _)| a.abs() >= r)
        .map(|(_, &w)| w)
        .sum::<NeumaierSum>()
        .value())
}

/// `1/F + (RF)·max_{|ξ|<=F} |μ̂ - ν̂| + μ-tail + ν-tail`, with `‖f‖∞ = 1`.
pub fn fourier_bound(
    mu_hat: &CFGrid,
    nu_hat: &CFGrid,
    r: f64,
    f: f64,
    mu_tail: f64,
    nu_tail: f64,
) -> Result<f64> {
    if !(r > 0.0 && f > 0.0) {
        return Err(domain!(
            "fourier_bound needs R, F > 0, got R = {r}, F = {f}"
        ));
    }
    if mu_hat.xi_max < f {
        return Err(domain!("CF grid reaches {} but F = {f}", mu_hat.xi_max));
    }
    let gap = mu_hat.sup_gap(nu_hat, f)?;
    Ok(1.0 / f + r * f * gap + mu_tail + nu_tail)
}

/// The bound for `(P₁+P₂)/𝔰` against 𝒵 assembled from the asymptotic sizes
/// of each piece, with `R₁ = √(log log T)`, `R₂ = √(log log log T)` and
/// `F = C √(log log T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssembledBound {
    pub r1: f64,
    pub r2: f64,
    pub f: f64,
    /// `1/F`, `R₁F·(log log T)^{-2}`, `1/log T`, `(log T)^{-D}`.
    pub p1_terms: [f64; 4],
    /// `1/F`, `R₂F·(log log T)^{-2}`, `1/log log T`, `(log log T)^{-D}`.
    pub p2_terms: [f64; 4],
    pub total: f64,
}

pub fn assembled_bound(t: f64, c: f64, d: f64) -> Result<AssembledBound> {
    let log_t = t.ln();
    let l2 = log_t.ln();
    let l3 = l2.ln();
    if !(l3 > 0.0 && l3.is_finite()) {
        return Err(domain!("log log log T must be positive, got T = {t}"));
    }
    if !(c > 0.0) {
        return Err(domain!("constant C must be positive, got {c}"));
    }
    let r1 = l2.sqrt();
    let r2 = l3.sqrt();
    let f = c * l2.sqrt();
    let cf_gap = l2.powi(-2);
    let p1_terms = [1.0 / f, r1 * f * cf_gap, 1.0 / log_t, log_t.powf(-d)];
    let p2_terms = [1.0 / f, r2 * f * cf_gap, 1.0 / l2, l2.powf(-d)];
    let total = p1_terms.iter().chain(&p2_terms).sum();
    Ok(AssembledBound {
        r1,
        r2,
        f,
        p1_terms,
        p2_terms,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn grid_validation() {
        let m = EmpiricalMeasure::dirac(0.0).unwrap();
        assert!(empirical_cf(&m, 3.0, 4).is_err());
        assert!(empirical_cf(&m, 3.0, 1).is_err());
        assert!(empirical_cf(&m, 0.0, 5).is_err());
        let g = empirical_cf(&m, 3.0, 7).unwrap();
        assert_eq!(g.nodes(), [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn dirac_at_zero_is_constant_one() {
        let g = empirical_cf(&EmpiricalMeasure::dirac(0.0).unwrap(), 5.0, 101).unwrap();
        assert!(g.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn value_at_zero_is_exactly_one() {
        let m = EmpiricalMeasure::from_weighted(&[0.1, 0.7, 3.0], &[0.3, 0.3, 0.4]).unwrap();
        let g = empirical_cf(&m, 2.0, 9).unwrap();
        assert_eq!(g.values[4], Complex64::new(1.0, 0.0));
        // δ₁ has CF e^{iξ}
        let one = empirical_cf(&EmpiricalMeasure::dirac(1.0).unwrap(), 2.0, 9).unwrap();
        for (xi, v) in one.nodes().iter().zip(&one.values) {
            assert!((v - Complex64::from_polar(1.0, *xi)).norm() < 1e-15);
        }
    }

    #[test]
    fn normal_sample_cf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s: Vec<f64> = (0..10_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let g = empirical_cf(&EmpiricalMeasure::from_samples(&s).unwrap(), 1.0, 3).unwrap();
        assert!((g.values[2].re - (-0.5f64).exp()).abs() < 0.02);
        let tail = tail_probability(&EmpiricalMeasure::from_samples(&s).unwrap(), 2.0).unwrap();
        assert!((tail - 0.0455).abs() < 0.01);
    }

    #[test]
    fn tails() {
        let m = EmpiricalMeasure::from_weighted(&[-3.0, 0.0, 1.0], &[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(tail_probability(&m, 10.0).unwrap(), 0.0);
        assert!((tail_probability(&m, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            tail_probability(&EmpiricalMeasure::dirac(0.0).unwrap(), 0.5).unwrap(),
            0.0
        );
        assert!(tail_probability(&m, 0.0).is_err());
    }

    #[test]
    fn identical_transforms_leave_one_over_f() {
        let g = gaussian_cf(10.0, 201).unwrap();
        assert_eq!(fourier_bound(&g, &g, 3.0, 10.0, 0.0, 0.0).unwrap(), 0.1);
        let other = gaussian_cf(10.0, 101).unwrap();
        assert!(fourier_bound(&g, &other, 3.0, 10.0, 0.0, 0.0).is_err());
        assert!(fourier_bound(&g, &g, 3.0, 11.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn assembled_terms_follow_the_choices() {
        let t = 1e100;
        let b = assembled_bound(t, 1.0, 2.0).unwrap();
        let l2 = t.ln().ln();
        assert!((b.p1_terms[0] - 1.0 / l2.sqrt()).abs() < 1e-15);
        // R₁F (log log T)^{-2} = C log log T / (log log T)^2
        assert!((b.p1_terms[1] - 1.0 / l2).abs() < 1e-15);
        assert!((b.p2_terms[1] - l2.ln().sqrt() * l2.sqrt() / (l2 * l2)).abs() < 1e-15);
        assert!((b.p2_terms[2] - 1.0 / l2).abs() < 1e-15);
        let sum: f64 = b.p1_terms.iter().chain(&b.p2_terms).sum();
        assert_eq!(sum, b.total);
        // dominated by 2/√(log log T) up to a constant
        assert!(b.total * l2.sqrt() < 5.0);
        assert!(assembled_bound(10.0, 1.0, 2.0).is_err());
    }
}

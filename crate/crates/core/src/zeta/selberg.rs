//! Numerical check of Selberg's explicit formula for ζ'/ζ with the tapered
//! weight `Λ_X`.
//!
//! The exact identity reads
//!
//! ```text
//! ζ'/ζ(s) = -Σ_{n<X²} Λ_X(n) n^{-s}
//!           + (X^{2(1-s)} - X^{1-s}) / (log X (1-s)²)
//!           + (1/log X) Σ_{q≥1} (X^{-2q-s} - X^{-2(2q+s)}) / (2q+s)²
//!           + (1/log X) Σ_ρ (X^{ρ-s} - X^{2(ρ-s)}) / (s-ρ)²
//! ```
//!
//! The residual reported by [`verify_selberg_identity`] drops the pole and
//! trivial-zero terms (they are O(1)) and truncates the sum over ρ to the
//! supplied zero window.

use super::{zeta_log_deriv, EMConfig, SPoint, ZeroList};
use crate::error::{domain, Error, Result};
use crate::number_theory::{taper_factor, PrimeTable};
use crate::summation::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// No critical-line zero lies below this height.
const FIRST_ORDINATE_FLOOR: f64 = 14.0;
const TAIL_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergResidual {
    pub residual: f64,
    pub log_derivative: Complex64,
    pub dirichlet_sum: Complex64,
    pub zero_sum: Complex64,
    /// Bound on the contribution of zeros outside the window.
    pub tail_bound: f64,
}

fn tail_bound(s: SPoint, x: f64, width: f64) -> f64 {
    let amp = x.powf(0.5 - s.sigma) + x.powf(1.0 - 2.0 * s.sigma);
    let density_log = ((s.t.abs() + width) / (2.0 * PI)).ln().max(1.0);
    // both sides of the window, zero density (1/2π) log(t/2π)
    amp / x.ln() * 2.0 * (density_log + 1.0) / (2.0 * PI * width)
}

/// Half-width of the zero window that makes the omitted-zero bound < 1.
pub fn required_zero_window(s: SPoint, x: f64) -> f64 {
    let mut w = 1.0;
    while tail_bound(s, x, w) >= TAIL_LIMIT {
        w *= 1.25;
    }
    w
}

fn zero_sum(s: SPoint, x: f64, zeros: &ZeroList) -> Complex64 {
    let sc = s.to_complex();
    let ln_x = x.ln();
    let mut acc = ComplexSum::new();
    for &g in &zeros.ordinates {
        for rho in [Complex64::new(0.5, g), Complex64::new(0.5, -g)] {
            let d = rho - sc;
            let term = ((d * ln_x).exp() - (d * 2.0 * ln_x).exp()) / (d * d);
            acc.add(term);
        }
    }
    acc.value() / ln_x
}

fn dirichlet_sum(s: SPoint, x: f64, table: &PrimeTable) -> Result<Complex64> {
    let x2 = x * x;
    if (table.limit() as f64) < x2 - 1.0 {
        return Err(domain!(
            "prime table limit {} below X^2 = {x2}",
            table.limit()
        ));
    }
    let mut acc = ComplexSum::new();
    for &p in table.primes_in(0.0, x2) {
        let pf = p as f64;
        let lp = pf.ln();
        let mut pk = pf;
        let mut k = 1.0;
        while pk < x2 {
            let w = lp * taper_factor(pk, x);
            let ln_n = k * lp;
            let phase = Complex64::from_polar((-s.sigma * ln_n).exp(), -s.t * ln_n);
            acc.add(phase * w);
            pk *= pf;
            k += 1.0;
        }
    }
    Ok(acc.value())
}

/// Residual `|ζ'/ζ(s) + Σ Λ_X(n) n^{-s} - (1/log X) Σ_{γ in window} ...|`.
pub fn verify_selberg_identity(
    s: SPoint,
    x: f64,
    zeros: &ZeroList,
    table: &PrimeTable,
    cfg: &EMConfig,
) -> Result<SelbergResidual> {
    if !(x >= 2.0) {
        return Err(domain!("Selberg identity needs X >= 2, got {x}"));
    }
    let width = required_zero_window(s, x);
    let lower = (s.t.abs() - width).max(FIRST_ORDINATE_FLOOR);
    let upper = s.t.abs() + width;
    if zeros.window.0 > lower || zeros.window.1 < upper {
        return Err(Error::Precondition(format!(
            "zero window ({}, {}) too narrow at {s}: need coverage of [{lower}, {upper}] (half-width {width:.3})",
            zeros.window.0, zeros.window.1
        )));
    }
    let (log_derivative, _) = zeta_log_deriv(s, cfg)?;
    let dsum = dirichlet_sum(s, x, table)?;
    let zsum = zero_sum(s, x, zeros);
    let residual = (log_derivative + dsum - zsum).norm();
    let tail = tail_bound(s, x, zeros.window.1 - s.t.abs()).min(tail_bound(s, x, width));
    Ok(SelbergResidual {
        residual,
        log_derivative,
        dirichlet_sum: dsum,
        zero_sum: zsum,
        tail_bound: tail,
    })
}

/// Pole and trivial-zero terms of the exact identity, i.e. the part the
/// residual leaves out apart from distant zeros.
pub fn selberg_exact_remainder(s: SPoint, x: f64) -> Complex64 {
    let sc = s.to_complex();
    let ln_x = x.ln();
    let one_minus = Complex64::new(1.0, 0.0) - sc;
    let pole = ((one_minus * 2.0 * ln_x).exp() - (one_minus * ln_x).exp())
        / (one_minus * one_minus * ln_x);
    let mut trivial = ComplexSum::new();
    for q in 1..200 {
        let a = sc + 2.0 * q as f64;
        let term = ((-a * ln_x).exp() - (-a * 2.0 * ln_x).exp()) / (a * a);
        trivial.add(term);
        if term.norm() < 1e-18 {
            break;
        }
    }
    pole + trivial.value() / ln_x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::sieve_primes;
    use crate::zeta::find_zeros;

    #[test]
    fn matches_exact_formula_off_axis() {
        let table = sieve_primes(40_000).unwrap();
        let s = SPoint::new(0.6, 100.0);
        let x = 50.0;
        let zeros = find_zeros(1.0, 400.0, &EMConfig::for_height(400.0)).unwrap();
        let r =
            verify_selberg_identity(s, x, &zeros, &table, &EMConfig::for_height(100.0)).unwrap();
        let exact = selberg_exact_remainder(s, x);
        let lhs = r.log_derivative + r.dirichlet_sum - r.zero_sum;
        // what remains is the pole/trivial terms plus zeros above 400
        assert!((lhs - exact).norm() < r.tail_bound, "{lhs} vs {exact}");
        assert!((lhs - exact).norm() < 1e-2, "{}", (lhs - exact).norm());
        assert!(r.residual <= 10.0);
    }

    #[test]
    fn far_right_of_strip() {
        let table = sieve_primes(10_000).unwrap();
        let s = SPoint::new(2.0, 0.0);
        let zeros = find_zeros(1.0, 60.0, &EMConfig::for_height(60.0)).unwrap();
        let r =
            verify_selberg_identity(s, 50.0, &zeros, &table, &EMConfig::for_height(1.0)).unwrap();
        assert!(r.residual <= 10.0);
        assert!(r.zero_sum.norm() < 1e-3);
        let exact = selberg_exact_remainder(s, 50.0);
        assert!((r.log_derivative + r.dirichlet_sum - r.zero_sum - exact).norm() < 1e-6);
    }

    #[test]
    fn narrow_window_is_rejected() {
        let table = sieve_primes(10_000).unwrap();
        let s = SPoint::new(0.6, 100.0);
        let zeros = find_zeros(101.0, 150.0, &EMConfig::for_height(150.0)).unwrap();
        match verify_selberg_identity(s, 50.0, &zeros, &table, &EMConfig::for_height(100.0)) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("half-width")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_table_is_rejected() {
        let table = sieve_primes(1000).unwrap();
        let zeros = find_zeros(1.0, 60.0, &EMConfig::for_height(60.0)).unwrap();
        let r = verify_selberg_identity(
            SPoint::new(2.0, 0.0),
            50.0,
            &zeros,
            &table,
            &EMConfig::for_height(1.0),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}

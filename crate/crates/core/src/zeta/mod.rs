//! Riemann zeta evaluation, critical-line zeros and the Selberg identity check.

mod euler_maclaurin;
mod hardy;
mod selberg;

pub use euler_maclaurin::{
    log_abs_zeta, zeta, zeta_and_derivative, zeta_log_deriv, EMConfig, ZetaKernel, ZetaValue,
    ZetaWithDerivative, DEFAULT_HEIGHT_CAP, LOG_FLOOR, MAX_BERNOULLI_ORDER, MIN_SIGMA,
};
pub use hardy::{
    find_zeros, find_zeros_with, hardy_z, read_zero_cache, riemann_siegel_theta, rvm_main_count,
    write_zero_cache, ZeroList, DEFAULT_ZERO_HEIGHT_CAP, DEFAULT_ZERO_RESOLUTION,
};
pub use selberg::{
    required_zero_window, selberg_exact_remainder, verify_selberg_identity, SelbergResidual,
};

#[allow(unused_imports)]
pub(crate) use euler_maclaurin::log_abs;

use serde::{Deserialize, Serialize};
use std::fmt;

/// A point `σ + it` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SPoint {
    pub sigma: f64,
    pub t: f64,
}

impl SPoint {
    pub const fn new(sigma: f64, t: f64) -> Self {
        Self { sigma, t }
    }

    pub fn conj(self) -> Self {
        Self::new(self.sigma, -self.t)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.sigma, self.t)
    }
}

impl fmt::Display for SPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.sigma, self.t)
    }
}

//! Fixtures shared by the kernel benchmarks.

use zetaclt::experiment::unit_draw;
use zetaclt::metrics::EmpiricalMeasure;

/// `n` deterministic points, uniform on `[shift - 1, shift + 1]`.
pub fn uniform_measure(n: usize, seed: u64, shift: f64) -> EmpiricalMeasure {
    let xs: Vec<f64> = (0..n as u64)
        .map(|i| shift + 2.0 * unit_draw(seed, i) - 1.0)
        .collect();
    EmpiricalMeasure::from_samples(&xs).expect("finite samples")
}

use super::{sample_tau, RunConfig};
use crate::error::{config, Result};
use crate::moments::{moment_report, GridMoments, MomentReport};
use crate::number_theory::sieve_primes;
use crate::zeta::{
    find_zeros_with, log_abs, verify_selberg_identity, SPoint, ZetaKernel, DEFAULT_ZERO_HEIGHT_CAP,
    DEFAULT_ZERO_RESOLUTION,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddMoment {
    pub power: u32,
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub sigma0: f64,
    pub reports: Vec<MomentReport>,
    pub odd: Vec<OddMoment>,
}

/// Closed form, random phase and grid average for `k = 1..=moment_k_max`
/// at `σ₀ = 1/2 + 1/log T`, plus the first two odd moments.
pub fn run_moment_check(cfg: &RunConfig) -> Result<MomentCheck> {
    cfg.validate()?;
    if cfg.moment_k_max < 1 {
        return Err(config!("moment_k_max must be >= 1"));
    }
    let sigma0 = 0.5 + 1.0 / cfg.t.ln();
    let table = sieve_primes(cfg.moment_x.ceil().max(2.0) as u64)?;
    let max_power = (2 * cfg.moment_k_max).max(6);
    let grid = GridMoments::compute(
        cfg.moment_x,
        sigma0,
        cfg.t,
        cfg.moment_nodes,
        max_power,
        &table,
    )?;
    let reports = (1..=cfg.moment_k_max)
        .map(|k| moment_report(k, &grid, &table))
        .collect::<Result<Vec<_>>>()?;
    let odd = [1, 3]
        .into_iter()
        .map(|m| OddMoment {
            power: m,
            value: grid.moment(m).expect("computed up to max_power"),
            standard_error: grid.standard_error(m).expect("computed up to max_power"),
        })
        .collect();
    Ok(MomentCheck {
        sigma0,
        reports,
        odd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityPoint {
    pub t: f64,
    pub residual: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelbergSweep {
    pub sigma: f64,
    pub x: f64,
    pub zeros: usize,
    pub points: Vec<IdentityPoint>,
    pub max_residual: f64,
}

/// Selberg-identity residuals at `identity_points` equispaced heights.
pub fn selberg_sweep(cfg: &RunConfig) -> Result<SelbergSweep> {
    let (lo, hi) = (cfg.identity_t_min, cfg.identity_t_max);
    if !(0.0 < lo && lo <= hi) || cfg.identity_points < 1 {
        return Err(config!(
            "identity sweep needs 0 < t_min <= t_max and >= 1 point, got [{lo}, {hi}] x {}",
            cfg.identity_points
        ));
    }
    let top = hi + cfg.identity_window;
    let em = cfg.em_config(top);
    let zeros = find_zeros_with(
        (lo - cfg.identity_window).max(1.0),
        top,
        &em,
        DEFAULT_ZERO_RESOLUTION,
        DEFAULT_ZERO_HEIGHT_CAP,
    )?;
    let table = sieve_primes((cfg.identity_x * cfg.identity_x).ceil().max(2.0) as u64)?;
    let n = cfg.identity_points;
    let heights: Vec<f64> = (0..n)
        .map(|i| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let points = heights
        .par_iter()
        .map(|&t| {
            let r = verify_selberg_identity(
                SPoint::new(cfg.identity_sigma, t),
                cfg.identity_x,
                &zeros,
                &table,
                &em,
            )?;
            Ok(IdentityPoint {
                t,
                residual: r.residual,
                tail_bound: r.tail_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SelbergSweep {
        sigma: cfg.identity_sigma,
        x: cfg.identity_x,
        zeros: zeros.len(),
        max_residual: points.iter().map(|p| p.residual).fold(0.0, f64::max),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffAxisCheck {
    pub t: f64,
    pub sigma0: f64,
    pub samples: usize,
    pub excluded: usize,
    /// Mean of `|log|ζ(½+iτ)| - log|ζ(σ₀+iτ)||` over kept samples.
    pub mean_abs_diff: f64,
    /// `(σ₀ - ½) log T`.
    pub reference: f64,
}

/// Moves `τ`-samples from the critical line to `σ₀` and averages the change
/// in `log|ζ|`.
pub fn off_axis_check(cfg: &RunConfig) -> Result<OffAxisCheck> {
    cfg.validate()?;
    let sigma0 = cfg.offaxis_sigma0.unwrap_or(0.5 + 1.0 / cfg.t.ln());
    if !(sigma0 > 0.5) {
        return Err(config!(
            "off-axis shift must be positive: sigma0 = {sigma0} is not > 1/2"
        ));
    }
    let kernel = ZetaKernel::new(cfg.em_config(2.0 * cfg.t))?;
    let taus = sample_tau(cfg.t, cfg.samples, cfg.seed);
    let diffs: Vec<Option<f64>> = taus
        .par_iter()
        .map(|&tau| {
            let z = kernel.zeta_on_line(&[0.5, sigma0], tau)?;
            Ok(log_abs(z[0].value)
                .zip(log_abs(z[1].value))
                .map(|(a, b)| (a - b).abs()))
        })
        .collect::<Result<_>>()?;
    let kept: Vec<f64> = diffs.into_iter().flatten().collect();
    let excluded = cfg.samples - kept.len();
    Ok(OffAxisCheck {
        t: cfg.t,
        sigma0,
        samples: cfg.samples,
        excluded,
        mean_abs_diff: if kept.is_empty() {
            f64::NAN
        } else {
            kept.iter().sum::<f64>() / kept.len() as f64
        },
        reference: (sigma0 - 0.5) * cfg.t.ln(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub selberg: SelbergSweep,
    pub off_axis: OffAxisCheck,
}

pub fn run_identity_sweep(cfg: &RunConfig) -> Result<IdentitySweep> {
    // cheap precondition first
    if let Some(s) = cfg.offaxis_sigma0 {
        if !(s > 0.5) {
            return Err(config!(
                "off-axis shift must be positive: sigma0 = {s} is not > 1/2"
            ));
        }
    }
    Ok(IdentitySweep {
        selberg: selberg_sweep(cfg)?,
        off_axis: off_axis_check(cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_shift_rejected() {
        let cfg = RunConfig {
            offaxis_sigma0: Some(0.5),
            ..RunConfig::default()
        };
        match run_identity_sweep(&cfg) {
            Err(crate::Error::Config(msg)) => {
                assert!(msg.contains("off-axis shift must be positive"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_identity_sweep() {
        let cfg = RunConfig {
            t: 1e4,
            samples: 20,
            identity_points: 5,
            identity_t_min: 100.0,
            identity_t_max: 140.0,
            ..RunConfig::default()
        };
        let s = run_identity_sweep(&cfg).unwrap();
        assert_eq!(s.selberg.points.len(), 5);
        assert!(s.selberg.max_residual <= 10.0);
        assert!(s.selberg.zeros > 20);
        assert!((s.off_axis.reference - 1.0).abs() < 1e-12);
        assert!(s.off_axis.mean_abs_diff.is_finite());
    }

    #[test]
    fn small_moment_check() {
        let cfg = RunConfig {
            t: 1e5,
            moment_x: 10.0,
            moment_k_max: 2,
            moment_nodes: 400_001,
            ..RunConfig::default()
        };
        let m = run_moment_check(&cfg).unwrap();
        assert_eq!(m.reports.len(), 2);
        assert!(m.reports[0].gap_cf_emp < 0.1);
        assert_eq!(m.odd.len(), 2);
        for o in &m.odd {
            assert!(o.value.abs() <= 3.0 * o.standard_error, "{o:?}");
        }
    }
}

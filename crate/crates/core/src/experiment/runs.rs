use super::{sample_tau, RunConfig};
use crate::chain::{
    ladder_from_t, ChainEvaluator, ChainSample, Normalization, ParameterLadder, PrimeWeights,
};
use crate::error::{config, domain, Result};
use crate::format::sig_digits;
use crate::metrics::{
    bl_distance, bl_distance_to_gaussian, empirical_cf, fourier_bound, gaussian_cf,
    kolmogorov_to_gaussian, tail_probability, EmpiricalMeasure, GaussianRef,
};
use crate::number_theory::{prime_variance, sieve_primes, PrimeTable};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::fmt;

/// Runs excluding more than this fraction of samples are marked degraded.
pub const MAX_EXCLUSION_RATE: f64 = 0.01;

const TRIANGLE_SLACK: f64 = 1e-9;

pub const CHAIN_CSV_COLUMNS: [&str; 18] = [
    "T",
    "samples",
    "excluded",
    "norm_mode",
    "d_v_w",
    "d_w_x",
    "d_x_p",
    "d_p_p12",
    "d_p12_z",
    "d_sum",
    "d_v_z_direct",
    "X",
    "X1",
    "X2",
    "sigma0",
    "s_norm",
    "seed",
    "status",
];

pub fn chain_csv_header() -> String {
    CHAIN_CSV_COLUMNS.join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Degraded,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::Ok => "ok",
            RunStatus::Degraded => "degraded",
        })
    }
}

/// Stagewise bounded-Lipschitz distances for one run.
///
/// Stage names: `v = log|ζ(½+iτ)|`, `w = log|ζ(σ₀+iτ)|`, `x = Re 𝒫(s₀)`,
/// `p = P(s₀)`, `p12 = P₁+P₂`, `z` the standard normal; all divided by the
/// run's scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub t: f64,
    pub samples: usize,
    pub excluded: usize,
    pub normalization: Normalization,
    pub scale: f64,
    pub d_v_w: f64,
    pub d_w_x: f64,
    pub d_x_p: f64,
    pub d_p_p12: f64,
    pub d_p12_z: f64,
    pub d_sum: f64,
    pub d_v_z_direct: f64,
    /// `d(P, P₁+P₂)` recomputed from per-sample `P₁+P₂` and `P₃`.
    pub d_p_p12_reconstructed: f64,
    pub triangle_ok: bool,
    /// Bound on the error from quantizing 𝒵.
    pub gaussian_uncertainty: f64,
    pub kolmogorov_p12_z: f64,
    /// `sup_{|ξ|<=F} |E e^{iξ(P₁+P₂)} - e^{-ξ²/2}|` with `F = cf_xi_max`.
    pub cf_sup_gap: f64,
    /// Fourier-side bound on `d_p12_z` with `R = r1` and `F = cf_xi_max`.
    pub fourier_rhs: f64,
    /// Mean of `|log|ζ(½+iτ)| - log|ζ(σ₀+iτ)||`, unnormalized.
    pub off_axis_mean: f64,
    pub ladder: ParameterLadder,
    pub seed: u64,
    pub status: RunStatus,
    #[serde(skip)]
    pub kept: Vec<ChainSample>,
}

fn sig(x: f64) -> String {
    sig_digits(x, 9)
}

impl ChainReport {
    pub fn csv_row(&self) -> String {
        let l = &self.ladder;
        [
            sig(self.t),
            self.samples.to_string(),
            self.excluded.to_string(),
            self.normalization.to_string(),
            sig(self.d_v_w),
            sig(self.d_w_x),
            sig(self.d_x_p),
            sig(self.d_p_p12),
            sig(self.d_p12_z),
            sig(self.d_sum),
            sig(self.d_v_z_direct),
            sig(l.x),
            sig(l.x1),
            sig(l.x2),
            sig(l.sigma0),
            sig(l.s_norm),
            self.seed.to_string(),
            self.status.to_string(),
        ]
        .join(",")
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}\n", chain_csv_header(), self.csv_row())
    }

    pub fn exclusion_rate(&self) -> f64 {
        self.excluded as f64 / self.samples as f64
    }
}

fn prime_table_for(ladder: &ParameterLadder) -> Result<PrimeTable> {
    let need = (ladder.x * ladder.x).ceil().max(ladder.x2.ceil()).max(2.0);
    sieve_primes(need as u64)
}

fn measure(kept: &[ChainSample], f: impl Fn(&ChainSample) -> f64) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::from_samples(&kept.iter().map(f).collect::<Vec<_>>())
}

fn std_normal_tail(r: f64) -> f64 {
    let g = Normal::new(0.0, 1.0).expect("valid parameters");
    2.0 * (1.0 - g.cdf(r))
}

/// Samples `τ`, evaluates every chain stage and measures all distances.
pub fn run_chain_experiment(cfg: &RunConfig) -> Result<ChainReport> {
    cfg.validate()?;
    let ladder = ladder_from_t(cfg.t, cfg.clamp_policy()?)?;
    let table = prime_table_for(&ladder)?;
    let em = cfg.em_config(2.0 * cfg.t);
    let eval = ChainEvaluator::new(&ladder, &table, &em, cfg.normalization)?;
    let gref = GaussianRef::new(cfg.gaussian_n)?;

    let taus = sample_tau(cfg.t, cfg.samples, cfg.seed);
    let all: Vec<ChainSample> = taus
        .par_iter()
        .map(|&tau| eval.evaluate(tau))
        .collect::<Result<_>>()?;
    let kept: Vec<ChainSample> = all.into_iter().filter(|s| !s.flags.any()).collect();
    let excluded = cfg.samples - kept.len();
    if kept.is_empty() {
        return Err(domain!("every sample fell below the log floor"));
    }

    let v = measure(&kept, |s| s.v)?;
    let w = measure(&kept, |s| s.w)?;
    let x = measure(&kept, |s| s.x)?;
    let p = measure(&kept, |s| s.p)?;
    let p12 = measure(&kept, |s| s.p12)?;
    let p_rebuilt = measure(&kept, |s| s.p12 + s.p3)?;

    let d_v_w = bl_distance(&v, &w);
    let d_w_x = bl_distance(&w, &x);
    let d_x_p = bl_distance(&x, &p);
    let d_p_p12 = bl_distance(&p, &p12);
    let d_p12_z = bl_distance_to_gaussian(&p12, &gref);
    let d_sum = d_v_w + d_w_x + d_x_p + d_p_p12 + d_p12_z;
    let d_v_z_direct = bl_distance_to_gaussian(&v, &gref);

    let f = cfg.cf_xi_max;
    let r = cfg.r1.unwrap_or_else(|| cfg.t.ln().ln().sqrt());
    let mu_hat = empirical_cf(&p12, f, cfg.cf_points)?;
    let z_hat = gaussian_cf(f, cfg.cf_points)?;
    let cf_sup_gap = mu_hat.sup_gap(&z_hat, f)?;
    let fourier_rhs = fourier_bound(
        &mu_hat,
        &z_hat,
        r,
        f,
        tail_probability(&p12, r)?,
        std_normal_tail(r),
    )?;

    let off_axis_mean = kept
        .iter()
        .map(|s| (s.raw.log_zeta_half - s.raw.log_zeta_sigma0).abs())
        .sum::<f64>()
        / kept.len() as f64;

    let status = if excluded as f64 > MAX_EXCLUSION_RATE * cfg.samples as f64 {
        RunStatus::Degraded
    } else {
        RunStatus::Ok
    };
    Ok(ChainReport {
        t: cfg.t,
        samples: cfg.samples,
        excluded,
        normalization: cfg.normalization,
        scale: eval.scale(),
        d_v_w,
        d_w_x,
        d_x_p,
        d_p_p12,
        d_p12_z,
        d_sum,
        d_v_z_direct,
        d_p_p12_reconstructed: bl_distance(&p_rebuilt, &p12),
        triangle_ok: d_v_z_direct <= d_sum + TRIANGLE_SLACK,
        gaussian_uncertainty: gref.discretization_error(),
        kolmogorov_p12_z: kolmogorov_to_gaussian(&p12),
        cf_sup_gap,
        fourier_rhs,
        off_axis_mean,
        ladder,
        seed: cfg.seed,
        status,
        kept,
    })
}

#[derive(Debug, Clone)]
pub struct LadderRow {
    pub t: f64,
    pub result: std::result::Result<ChainReport, String>,
}

/// One chain run per `T`, plus the rank correlation between the `P₂`
/// cutoff and the Gaussian-stage distance.
#[derive(Debug, Clone)]
pub struct RateLadder {
    pub rows: Vec<LadderRow>,
    /// Spearman correlation of `d_p12_z` against `X2` over successful rows.
    pub spearman_x2_d: Option<f64>,
}

impl RateLadder {
    pub fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut out = chain_csv_header();
        out.push('\n');
        for row in &self.rows {
            match &row.result {
                Ok(r) => out.push_str(&r.csv_row()),
                Err(msg) => {
                    let mut cells = vec![String::new(); CHAIN_CSV_COLUMNS.len()];
                    cells[0] = sig(row.t);
                    cells[1] = cfg.samples.to_string();
                    cells[3] = cfg.normalization.to_string();
                    cells[16] = cfg.seed.to_string();
                    cells[17] = format!("error: {}", msg.replace([',', '\n'], ";"));
                    out.push_str(&cells.join(","));
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn run_rate_ladder(cfg: &RunConfig, t_values: &[f64]) -> RateLadder {
    let rows: Vec<LadderRow> = t_values
        .iter()
        .map(|&t| {
            let mut c = cfg.clone();
            c.t = t;
            LadderRow {
                t,
                result: run_chain_experiment(&c).map_err(|e| e.to_string()),
            }
        })
        .collect();
    let (xs, ds): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok())
        .map(|r| (r.ladder.x2, r.d_p12_z))
        .unzip();
    RateLadder {
        spearman_x2_d: spearman(&xs, &ds),
        rows,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub theta_2: f64,
    pub x2: f64,
    pub primes: usize,
    pub d_p12_z: f64,
}

/// `d((P₁+P₂)/scale, 𝒵)` at fixed `T` as the `P₂` cutoff grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffLadder {
    pub rows: Vec<CutoffRow>,
    /// Adjacent pairs where the distance went up.
    pub increases: usize,
    pub pairs: usize,
    pub spearman: Option<f64>,
}

pub fn run_cutoff_ladder(cfg: &RunConfig) -> Result<CutoffLadder> {
    cfg.validate()?;
    let theta_2s = &cfg.cutoff_theta_2_values;
    if theta_2s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config!("cutoff_theta_2_values must be strictly increasing"));
    }
    let gref = GaussianRef::new(cfg.gaussian_n)?;
    let taus = sample_tau(cfg.t, cfg.samples, cfg.seed);
    let mut rows = Vec::with_capacity(theta_2s.len());
    for &theta_2 in theta_2s {
        let mut c = cfg.clone();
        c.theta_2 = Some(theta_2);
        let ladder = ladder_from_t(c.t, c.clamp_policy()?)?;
        let table = sieve_primes(ladder.x2.ceil().max(2.0) as u64)?;
        let weights = PrimeWeights::new(ladder.sigma0, ladder.x2, &table)?;
        let scale = match c.normalization {
            Normalization::Paper => ladder.s_norm,
            Normalization::Variance => prime_variance(ladder.x2, ladder.sigma0, &table)?.sqrt(),
        };
        let values: Vec<f64> = taus
            .par_iter()
            .map(|&tau| weights.real_sum(tau, 0..weights.len()) / scale)
            .collect();
        rows.push(CutoffRow {
            theta_2,
            x2: ladder.x2,
            primes: weights.len(),
            d_p12_z: bl_distance_to_gaussian(&EmpiricalMeasure::from_samples(&values)?, &gref),
        });
    }
    let increases = rows
        .windows(2)
        .filter(|w| w[1].d_p12_z > w[0].d_p12_z)
        .count();
    let (xs, ds): (Vec<f64>, Vec<f64>) = rows.iter().map(|r| (r.x2, r.d_p12_z)).unzip();
    Ok(CutoffLadder {
        pairs: rows.len().saturating_sub(1),
        increases,
        spearman: spearman(&xs, &ds),
        rows,
    })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation; `None` below two points or with a constant
/// input.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - mean) * (y - mean);
        saa += (x - mean) * (x - mean);
        sbb += (y - mean) * (y - mean);
    }
    (saa > 0.0 && sbb > 0.0).then(|| sab / (saa * sbb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            t: 1e4,
            samples: 40,
            gaussian_n: 1000,
            theta_x: Some(0.3),
            theta_1: Some(0.1),
            theta_2: Some(0.2),
            ..RunConfig::default()
        }
    }

    #[test]
    fn small_chain_run() {
        let r = run_chain_experiment(&small_cfg()).unwrap();
        assert_eq!(r.samples, 40);
        assert_eq!(r.kept.len() + r.excluded, 40);
        assert!(r.triangle_ok);
        assert!(r.d_v_z_direct <= r.d_sum + 1e-9);
        assert!((r.d_p_p12 - r.d_p_p12_reconstructed).abs() <= 1e-9);
        assert!(r.fourier_rhs > 0.0 && r.cf_sup_gap >= 0.0);
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), CHAIN_CSV_COLUMNS.len());
        assert!(row.ends_with(",42,ok"));
    }

    #[test]
    fn empty_p1_is_a_config_error() {
        let cfg = RunConfig {
            theta_1: Some(0.05),
            ..small_cfg()
        };
        match run_chain_experiment(&cfg) {
            Err(crate::Error::Config(msg)) => assert!(msg.contains("P1"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_ladder_is_header_only() {
        let cfg = small_cfg();
        let l = run_rate_ladder(&cfg, &[]);
        assert_eq!(l.to_csv(&cfg), format!("{}\n", chain_csv_header()));
        assert!(l.spearman_x2_d.is_none());
    }

    #[test]
    fn ladder_records_failures_and_continues() {
        let cfg = RunConfig {
            samples: 8,
            ..small_cfg()
        };
        let l = run_rate_ladder(&cfg, &[10.0, 1e4]);
        let csv = l.to_csv(&cfg);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].contains("error:"));
        assert_eq!(lines[1].split(',').count(), CHAIN_CSV_COLUMNS.len());
        assert!(lines[2].ends_with(",ok") || lines[2].ends_with(",degraded"));
    }

    #[test]
    fn spearman_values() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[1.0, 5.0, 9.0]), Some(1.0));
        assert_eq!(spearman(&[1.0], &[1.0]), None);
        assert_eq!(spearman(&[1.0, 2.0], &[1.0, 1.0]), None);
        assert_eq!(ranks(&[2.0, 1.0, 2.0]), [2.5, 1.0, 2.5]);
    }
}

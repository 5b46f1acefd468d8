//! The parameter ladder and every stage of the approximation chain
//!
//! ```text
//! log|ζ(½+iτ)|  →  log|ζ(σ₀+iτ)|  →  Re 𝒫(s₀)  →  P(s₀)  →  P₁(s₀)+P₂(s₀)
//! ```
//!
//! evaluated at a single height `τ`.

mod dirichlet;
mod ladder;

pub use dirichlet::{mollifier_p, prime_sum, PrimeWeights};
pub use ladder::{ladder_from_t, Clamp, ClampPolicy, Exponents, ParameterLadder};

use crate::error::{config, domain, Result};
use crate::number_theory::{prime_variance, PrimeTable};
use crate::zeta::{log_abs, EMConfig, SPoint, ZetaKernel};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// How the chain stages are scaled before distances are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Divide by `𝔰 = √(½ log log T)`.
    Paper,
    /// Divide by `√(½ Σ_{p<=X2} p^{-2σ₀})`, the variance of `P₁+P₂` under
    /// independent phases.
    Variance,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Paper => "paper",
            Normalization::Variance => "variance",
        })
    }
}

impl FromStr for Normalization {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Normalization::Paper),
            "variance" => Ok(Normalization::Variance),
            other => Err(config!(
                "normalization must be paper|variance, got {other:?}"
            )),
        }
    }
}

/// Unnormalized stage values at one `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawStages {
    /// `log|ζ(½+iτ)|`; NaN when flagged.
    pub log_zeta_half: f64,
    /// `log|ζ(σ₀+iτ)|`; NaN when flagged.
    pub log_zeta_sigma0: f64,
    /// `Re 𝒫(s₀)`.
    pub mollifier: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFlags {
    /// `|ζ(½+iτ)|` fell below the log floor.
    pub half_line_below_floor: bool,
    /// `|ζ(σ₀+iτ)|` fell below the log floor.
    pub off_axis_below_floor: bool,
}

impl SampleFlags {
    pub fn any(&self) -> bool {
        self.half_line_below_floor || self.off_axis_below_floor
    }
}

/// All chain stages at one sampled `τ`, divided by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSample {
    pub tau: f64,
    pub v: f64,
    pub w: f64,
    pub x: f64,
    pub p: f64,
    pub p12: f64,
    pub p3: f64,
    pub scale: f64,
    pub raw: RawStages,
    pub flags: SampleFlags,
}

/// Reusable evaluator: one `ln n` table for ζ and cached prime weights.
#[derive(Debug, Clone)]
pub struct ChainEvaluator<'a> {
    ladder: ParameterLadder,
    table: &'a PrimeTable,
    kernel: ZetaKernel,
    weights: PrimeWeights,
    n1: usize,
    n2: usize,
    scale: f64,
    normalization: Normalization,
}

impl<'a> ChainEvaluator<'a> {
    pub fn new(
        ladder: &ParameterLadder,
        table: &'a PrimeTable,
        cfg: &EMConfig,
        normalization: Normalization,
    ) -> Result<Self> {
        let x2cap = (ladder.x * ladder.x).ceil() - 1.0;
        if (table.limit() as f64) < x2cap {
            return Err(domain!(
                "prime table limit {} below X^2 = {}",
                table.limit(),
                ladder.x * ladder.x
            ));
        }
        let weights = PrimeWeights::new(ladder.sigma0, ladder.x, table)?;
        let n1 = weights.count_upto(ladder.x1);
        let n2 = weights.count_upto(ladder.x2);
        if n1 == 0 {
            return Err(config!("P1 is empty: no primes <= X1 = {}", ladder.x1));
        }
        let scale = match normalization {
            Normalization::Paper => ladder.s_norm,
            Normalization::Variance => prime_variance(ladder.x2, ladder.sigma0, table)?.sqrt(),
        };
        // validates height cap and accuracy domain at the top of [T, 2T]
        cfg.check(SPoint::new(0.5, 2.0 * ladder.t))?;
        Ok(Self {
            ladder: ladder.clone(),
            table,
            kernel: ZetaKernel::new(*cfg)?,
            weights,
            n1,
            n2,
            scale,
            normalization,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn ladder(&self) -> &ParameterLadder {
        &self.ladder
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        let t = self.ladder.t;
        if !(tau >= t && tau <= 2.0 * t) {
            return Err(domain!("tau = {tau} outside [T, 2T] = [{t}, {}]", 2.0 * t));
        }
        Ok(())
    }

    /// The prime-sum pieces `(P₁, P₂, P₃)` at `τ`; no ζ evaluation.
    pub fn prime_parts(&self, tau: f64) -> (f64, f64, f64) {
        let w = &self.weights;
        (
            w.real_sum(tau, 0..self.n1),
            w.real_sum(tau, self.n1..self.n2),
            w.real_sum(tau, self.n2..w.len()),
        )
    }

    pub fn evaluate(&self, tau: f64) -> Result<ChainSample> {
        self.check_tau(tau)?;
        let sigma0 = self.ladder.sigma0;
        let zs = self.kernel.zeta_on_line(&[0.5, sigma0], tau)?;
        let half = log_abs(zs[0].value);
        let off = log_abs(zs[1].value);
        let flags = SampleFlags {
            half_line_below_floor: half.is_none(),
            off_axis_below_floor: off.is_none(),
        };
        let mollifier = mollifier_p(SPoint::new(sigma0, tau), self.ladder.x, self.table)?.re;
        let (p1, p2, p3) = self.prime_parts(tau);
        let raw = RawStages {
            log_zeta_half: half.unwrap_or(f64::NAN),
            log_zeta_sigma0: off.unwrap_or(f64::NAN),
            mollifier,
            p1,
            p2,
            p3,
        };
        let s = self.scale;
        Ok(ChainSample {
            tau,
            v: raw.log_zeta_half / s,
            w: raw.log_zeta_sigma0 / s,
            x: mollifier / s,
            p: (p1 + p2 + p3) / s,
            p12: (p1 + p2) / s,
            p3: p3 / s,
            scale: s,
            raw,
            flags,
        })
    }
}

/// One-shot chain evaluation; see [`ChainEvaluator`] for batches.
pub fn evaluate_chain(
    tau: f64,
    ladder: &ParameterLadder,
    table: &PrimeTable,
    cfg: &EMConfig,
    normalization: Normalization,
) -> Result<ChainSample> {
    ChainEvaluator::new(ladder, table, cfg, normalization)?.evaluate(tau)
}

use crate::error::{config, Result};
use serde::{Deserialize, Serialize};

/// Exponents `θ` such that `X = T^θ_X`, `X1 = T^θ_1`, `X2 = T^θ_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub theta_x: f64,
    pub theta_1: f64,
    pub theta_2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClampPolicy {
    /// Upper bound on `X^2`, i.e. on the mollifier sum length.
    pub x_squared_cap: u64,
    /// When set, replaces the iterated-log formulas.
    pub explicit_exponents: Option<Exponents>,
}

impl Default for ClampPolicy {
    fn default() -> Self {
        Self {
            x_squared_cap: 1_000_000_000,
            explicit_exponents: None,
        }
    }
}

/// A clamp applied while building the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clamp {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
}

/// All scale parameters of the approximation chain at height `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterLadder {
    pub t: f64,
    /// `1/2 + 1/log T`.
    pub sigma0: f64,
    /// `√(½ log log T)`.
    pub s_norm: f64,
    pub x: f64,
    pub x1: f64,
    pub x2: f64,
    pub policy: ClampPolicy,
    pub clamps: Vec<Clamp>,
}

fn iterated_log(t: f64, times: u32) -> Option<f64> {
    let mut v = t;
    for _ in 0..times {
        if !(v > 0.0) {
            return None;
        }
        v = v.ln();
    }
    (v > 0.0 && v.is_finite()).then_some(v)
}

pub fn ladder_from_t(t: f64, policy: ClampPolicy) -> Result<ParameterLadder> {
    if !(t >= 1e3) || !t.is_finite() {
        return Err(config!("T must be >= 1e3, got {t}"));
    }
    let log_t = t.ln();
    let sigma0 = 0.5 + 1.0 / log_t;
    let s_norm = (0.5 * log_t.ln()).sqrt();

    let (mut x, mut x1, mut x2) = match policy.explicit_exponents {
        Some(e) => {
            if !(e.theta_x > 0.0 && e.theta_1 > 0.0 && e.theta_2 > 0.0) {
                return Err(config!("explicit exponents must be positive, got {e:?}"));
            }
            (t.powf(e.theta_x), t.powf(e.theta_1), t.powf(e.theta_2))
        }
        None => {
            let log4 = iterated_log(t, 4).ok_or_else(|| {
                config!(
                    "log_4 T is undefined or non-positive at T = {t} (needs T > e^(e^e) ≈ 3.8e6); \
                     supply explicit exponents theta_x, theta_1, theta_2"
                )
            })?;
            let loglog = iterated_log(t, 2).expect("defined when log_4 is");
            let logloglog = iterated_log(t, 3).expect("defined when log_4 is");
            (
                t.powf(1.0 / log4.powf(0.25)),
                t.powf(1.0 / loglog),
                t.powf(1.0 / logloglog),
            )
        }
    };

    let mut clamps = Vec::new();
    let mut clamp = |name: &str, value: &mut f64, limit: f64| {
        if *value > limit {
            clamps.push(Clamp {
                parameter: name.to_string(),
                from: *value,
                to: limit,
            });
            *value = limit;
        }
    };
    let x_cap = (policy.x_squared_cap as f64).sqrt();
    clamp("X", &mut x, x_cap);
    clamp("X2", &mut x2, x);
    clamp("X1", &mut x1, x2);

    if x1 < 2.0 {
        return Err(config!(
            "X1 = {x1:.4} < 2 leaves P1 empty (no primes <= X1); raise theta_1 or T"
        ));
    }
    Ok(ParameterLadder {
        t,
        sigma0,
        s_norm,
        x,
        x1,
        x2,
        policy,
        clamps,
    })
}

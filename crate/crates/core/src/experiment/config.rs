//! Flat `key = value` run configuration.
//!
//! One key per line, `#` starts a comment, unknown or repeated keys are
//! errors. Optional values are written as `none` and lists as
//! comma-separated numbers.

use crate::chain::{ClampPolicy, Exponents, Normalization};
use crate::error::{config, Result};
use crate::zeta::{EMConfig, SPoint};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
    /// Cutoff exponents; all three or none (none means the iterated-log
    /// formulas).
    pub theta_x: Option<f64>,
    pub theta_1: Option<f64>,
    pub theta_2: Option<f64>,
    pub x_squared_cap: u64,
    /// Euler–Maclaurin terms; none picks enough for height `2T`.
    pub em_terms: Option<u64>,
    pub em_bernoulli_order: u32,
    pub em_error_budget: f64,
    pub em_height_cap: f64,
    pub normalization: Normalization,
    pub gaussian_n: usize,
    pub cf_xi_max: f64,
    pub cf_points: usize,
    /// Tail radius for the Fourier bound; none means `√(log log T)`.
    pub r1: Option<f64>,
    pub constant_c: f64,
    pub constant_d: f64,
    pub moment_x: f64,
    pub moment_k_max: u32,
    pub moment_nodes: usize,
    pub identity_x: f64,
    pub identity_sigma: f64,
    pub identity_t_min: f64,
    pub identity_t_max: f64,
    pub identity_points: usize,
    pub identity_window: f64,
    /// Shifted abscissa for the off-axis comparison; none means
    /// `1/2 + 1/log T`.
    pub offaxis_sigma0: Option<f64>,
    pub ladder_t_values: Vec<f64>,
    pub cutoff_theta_2_values: Vec<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t: 1e6,
            samples: 2000,
            seed: 42,
            theta_x: Some(0.25),
            theta_1: Some(0.10),
            theta_2: Some(0.18),
            x_squared_cap: ClampPolicy::default().x_squared_cap,
            em_terms: None,
            em_bernoulli_order: EMConfig::default().bernoulli_order,
            em_error_budget: EMConfig::default().error_budget,
            em_height_cap: EMConfig::default().height_cap,
            normalization: Normalization::Variance,
            gaussian_n: 10_000,
            cf_xi_max: 3.0,
            cf_points: 301,
            r1: None,
            constant_c: 1.0,
            constant_d: 1.0,
            moment_x: 100.0,
            moment_k_max: 3,
            moment_nodes: crate::moments::DEFAULT_GRID_NODES,
            identity_x: 50.0,
            identity_sigma: 0.6,
            identity_t_min: 100.0,
            identity_t_max: 500.0,
            identity_points: 100,
            identity_window: 50.0,
            offaxis_sigma0: None,
            ladder_t_values: vec![1e5, 1e6, 1e7],
            cutoff_theta_2_values: vec![0.10, 0.12, 0.14, 0.16, 0.18, 0.20],
            out: None,
            threads: None,
        }
    }
}

fn fmt_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| config!("{key}: cannot parse {value:?}"))
}

fn parse_opt<T: FromStr>(key: &str, value: &str) -> Result<Option<T>> {
    if value == "none" {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl RunConfig {
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("t", self.t.to_string());
        put("samples", self.samples.to_string());
        put("seed", self.seed.to_string());
        put("theta_x", fmt_opt(&self.theta_x));
        put("theta_1", fmt_opt(&self.theta_1));
        put("theta_2", fmt_opt(&self.theta_2));
        put("x_squared_cap", self.x_squared_cap.to_string());
        put("em_terms", fmt_opt(&self.em_terms));
        put("em_bernoulli_order", self.em_bernoulli_order.to_string());
        put("em_error_budget", self.em_error_budget.to_string());
        put("em_height_cap", self.em_height_cap.to_string());
        put("normalization", self.normalization.to_string());
        put("gaussian_n", self.gaussian_n.to_string());
        put("cf_xi_max", self.cf_xi_max.to_string());
        put("cf_points", self.cf_points.to_string());
        put("r1", fmt_opt(&self.r1));
        put("constant_c", self.constant_c.to_string());
        put("constant_d", self.constant_d.to_string());
        put("moment_x", self.moment_x.to_string());
        put("moment_k_max", self.moment_k_max.to_string());
        put("moment_nodes", self.moment_nodes.to_string());
        put("identity_x", self.identity_x.to_string());
        put("identity_sigma", self.identity_sigma.to_string());
        put("identity_t_min", self.identity_t_min.to_string());
        put("identity_t_max", self.identity_t_max.to_string());
        put("identity_points", self.identity_points.to_string());
        put("identity_window", self.identity_window.to_string());
        put("offaxis_sigma0", fmt_opt(&self.offaxis_sigma0));
        put("ladder_t_values", fmt_list(&self.ladder_t_values));
        put(
            "cutoff_theta_2_values",
            fmt_list(&self.cutoff_theta_2_values),
        );
        put(
            "out",
            self.out
                .as_ref()
                .map_or_else(|| "none".into(), |p| p.display().to_string()),
        );
        put("threads", fmt_opt(&self.threads));
        s
    }

    /// Applies `key = value` lines on top of the defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config!("line {}: expected key = value, got {raw:?}", i + 1))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(config!("line {}: key {k:?} repeated", i + 1));
            }
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, k: &str, v: &str) -> Result<()> {
        match k {
            "t" => self.t = parse(k, v)?,
            "samples" => self.samples = parse(k, v)?,
            "seed" => self.seed = parse(k, v)?,
            "theta_x" => self.theta_x = parse_opt(k, v)?,
            "theta_1" => self.theta_1 = parse_opt(k, v)?,
            "theta_2" => self.theta_2 = parse_opt(k, v)?,
            "x_squared_cap" => self.x_squared_cap = parse(k, v)?,
            "em_terms" => self.em_terms = parse_opt(k, v)?,
            "em_bernoulli_order" => self.em_bernoulli_order = parse(k, v)?,
            "em_error_budget" => self.em_error_budget = parse(k, v)?,
            "em_height_cap" => self.em_height_cap = parse(k, v)?,
            "normalization" => self.normalization = v.parse()?,
            "gaussian_n" => self.gaussian_n = parse(k, v)?,
            "cf_xi_max" => self.cf_xi_max = parse(k, v)?,
            "cf_points" => self.cf_points = parse(k, v)?,
            "r1" => self.r1 = parse_opt(k, v)?,
            "constant_c" => self.constant_c = parse(k, v)?,
            "constant_d" => self.constant_d = parse(k, v)?,
            "moment_x" => self.moment_x = parse(k, v)?,
            "moment_k_max" => self.moment_k_max = parse(k, v)?,
            "moment_nodes" => self.moment_nodes = parse(k, v)?,
            "identity_x" => self.identity_x = parse(k, v)?,
            "identity_sigma" => self.identity_sigma = parse(k, v)?,
            "identity_t_min" => self.identity_t_min = parse(k, v)?,
            "identity_t_max" => self.identity_t_max = parse(k, v)?,
            "identity_points" => self.identity_points = parse(k, v)?,
            "identity_window" => self.identity_window = parse(k, v)?,
            "offaxis_sigma0" => self.offaxis_sigma0 = parse_opt(k, v)?,
            "ladder_t_values" => self.ladder_t_values = parse_list(k, v)?,
            "cutoff_theta_2_values" => self.cutoff_theta_2_values = parse_list(k, v)?,
            "out" => self.out = (v != "none").then(|| PathBuf::from(v)),
            "threads" => self.threads = parse_opt(k, v)?,
            other => return Err(config!("unknown key {other:?}")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(config!("samples must be >= 1"));
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(config!("t must be positive, got {}", self.t));
        }
        if self.threads == Some(0) {
            return Err(config!("threads must be >= 1"));
        }
        self.exponents()?;
        Ok(())
    }

    pub fn exponents(&self) -> Result<Option<Exponents>> {
        match (self.theta_x, self.theta_1, self.theta_2) {
            (Some(theta_x), Some(theta_1), Some(theta_2)) => Ok(Some(Exponents {
                theta_x,
                theta_1,
                theta_2,
            })),
            (None, None, None) => Ok(None),
            _ => Err(config!("theta_x, theta_1, theta_2 must be set together")),
        }
    }

    pub fn clamp_policy(&self) -> Result<ClampPolicy> {
        Ok(ClampPolicy {
            x_squared_cap: self.x_squared_cap,
            explicit_exponents: self.exponents()?,
        })
    }

    /// Euler–Maclaurin settings good up to `height` for `1/2 <= σ <= 4`.
    pub fn em_config(&self, height: f64) -> EMConfig {
        let base = EMConfig {
            bernoulli_order: self.em_bernoulli_order,
            error_budget: self.em_error_budget,
            height_cap: self.em_height_cap,
            ..EMConfig::for_height(height)
        };
        match self.em_terms {
            Some(n) => base.with_terms(n),
            None => base.with_terms(
                base.required_terms(SPoint::new(0.5, height))
                    .max(base.required_terms(SPoint::new(4.0, height))),
            ),
        }
    }
}

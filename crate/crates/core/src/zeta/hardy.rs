//! Hardy Z-function and critical-line zero location.

use super::{zeta, EMConfig, SPoint};
use crate::error::{config, Error, Result};
use crate::format::sig_digits;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{BufRead, Write};

/// Default grid step of the sign-change scan.
pub const DEFAULT_ZERO_RESOLUTION: f64 = 0.05;
/// Largest height accepted by the zero finder.
pub const DEFAULT_ZERO_HEIGHT_CAP: f64 = 1.0e5;

const BISECTION_TOL: f64 = 1e-8;
const ZERO_VERIFY_TOL: f64 = 1e-5;
const COUNT_SLACK: f64 = 2.0;

/// Riemann–Siegel theta via its Stirling expansion with three correction
/// terms.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let t2 = t * t;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t * t2)
        + 31.0 / (80640.0 * t * t2 * t2)
}

/// `Z(t) = e^{iθ(t)} ζ(1/2 + it)`, real up to rounding.
pub fn hardy_z(t: f64, cfg: &EMConfig) -> Result<f64> {
    let z = zeta(SPoint::new(0.5, t), cfg)?.value;
    let rot = Complex64::from_polar(1.0, riemann_siegel_theta(t));
    Ok((rot * z).re)
}

/// Main term `θ(t)/π + 1` of the Riemann–von Mangoldt counting function.
pub fn rvm_main_count(t: f64) -> f64 {
    riemann_siegel_theta(t) / PI + 1.0
}

/// Critical-line zeros `1/2 + iγ` found in a height window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub window: (f64, f64),
    pub resolution: f64,
    /// Main-term zero count for the window.
    pub expected_count: f64,
    /// Whether the number found is within 2 of `expected_count`.
    pub count_ok: bool,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

pub fn find_zeros(t_min: f64, t_max: f64, cfg: &EMConfig) -> Result<ZeroList> {
    find_zeros_with(
        t_min,
        t_max,
        cfg,
        DEFAULT_ZERO_RESOLUTION,
        DEFAULT_ZERO_HEIGHT_CAP,
    )
}

/// Scans `Z` on a grid of step at most `resolution` and refines each sign
/// change by bisection.
pub fn find_zeros_with(
    t_min: f64,
    t_max: f64,
    cfg: &EMConfig,
    resolution: f64,
    height_cap: f64,
) -> Result<ZeroList> {
    if !(t_min > 0.0 && t_min < t_max) {
        return Err(config!(
            "zero window needs 0 < t_min < t_max, got ({t_min}, {t_max})"
        ));
    }
    if t_max > height_cap {
        return Err(config!(
            "zero window top {t_max} exceeds the zero-finder cap {height_cap}"
        ));
    }
    if !(resolution > 0.0) {
        return Err(config!("resolution must be positive"));
    }
    cfg.check(SPoint::new(0.5, t_max))?;

    let steps = ((t_max - t_min) / resolution).ceil().max(1.0) as usize;
    let h = (t_max - t_min) / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| t_min + i as f64 * h).collect();
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&t| hardy_z(t, cfg))
        .collect::<Result<_>>()?;

    let mut brackets = Vec::new();
    for i in 0..steps {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            brackets.push((grid[i], grid[i]));
        } else if a * b < 0.0 {
            brackets.push((grid[i], grid[i + 1]));
        }
    }
    if values[steps] == 0.0 {
        brackets.push((grid[steps], grid[steps]));
    }

    let ordinates: Vec<f64> = brackets
        .par_iter()
        .map(|&(a, b)| bisect(a, b, cfg))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&g| zeta(SPoint::new(0.5, g), cfg).is_ok_and(|z| z.value.norm() < ZERO_VERIFY_TOL))
        .collect();

    let expected = rvm_main_count(t_max) - rvm_main_count(t_min);
    let count_ok = (ordinates.len() as f64 - expected).abs() <= COUNT_SLACK;
    Ok(ZeroList {
        ordinates,
        window: (t_min, t_max),
        resolution: h,
        expected_count: expected,
        count_ok,
    })
}

fn bisect(mut a: f64, mut b: f64, cfg: &EMConfig) -> Result<f64> {
    if a == b {
        return Ok(a);
    }
    let mut fa = hardy_z(a, cfg)?;
    while b - a > BISECTION_TOL {
        let m = 0.5 * (a + b);
        let fm = hardy_z(m, cfg)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fa < 0.0) == (fm < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Writes the text zero cache: a `# window t_min t_max resolution` header
/// line followed by one ordinate per line at 12 significant digits.
pub fn write_zero_cache<W: Write>(zeros: &ZeroList, mut out: W) -> Result<()> {
    writeln!(
        out,
        "# window {} {} {}",
        zeros.window.0, zeros.window.1, zeros.resolution
    )?;
    for g in &zeros.ordinates {
        writeln!(out, "{}", sig_digits(*g, 12))?;
    }
    Ok(())
}

pub fn read_zero_cache<R: BufRead>(input: R) -> Result<ZeroList> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("zero cache: empty file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 || fields[0] != "#" || fields[1] != "window" {
        return Err(Error::Parse(format!("zero cache: bad header {header:?}")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("zero cache header: {e}")))
    };
    let (t_min, t_max, resolution) = (num(fields[2])?, num(fields[3])?, num(fields[4])?);
    let mut ordinates = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let g: f64 = line
            .parse()
            .map_err(|e| Error::Parse(format!("zero cache line {line:?}: {e}")))?;
        if ordinates.last().is_some_and(|&p| g <= p) {
            return Err(Error::Parse("zero cache: ordinates not increasing".into()));
        }
        ordinates.push(g);
    }
    let expected = rvm_main_count(t_max) - rvm_main_count(t_min);
    let count_ok = (ordinates.len() as f64 - expected).abs() <= COUNT_SLACK;
    Ok(ZeroList {
        ordinates,
        window: (t_min, t_max),
        resolution,
        expected_count: expected,
        count_ok,
    })
}

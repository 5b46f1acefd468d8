//! Distances between one-dimensional probability measures.

mod bl;
mod fourier;
mod gaussian;

pub use bl::{bl_distance, w1_distance};
pub use fourier::{
    assembled_bound, empirical_cf, fourier_bound, gaussian_cf, tail_probability, AssembledBound,
    CFGrid,
};
pub use gaussian::{
    bl_distance_to_gaussian, kolmogorov_distance, kolmogorov_to_gaussian, GaussianRef,
    MIN_QUANTIZATION,
};

use crate::error::{domain, Error, Result};
use crate::summation::NeumaierSum;
use std::io::{BufRead, Write};

/// A finitely supported probability measure on ℝ.
///
/// Atoms are strictly increasing; duplicate inputs are merged and weights
/// renormalized so their compensated sum is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Uniform weights over `samples`.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(domain!("empirical measure needs at least one sample"));
        }
        if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
            return Err(domain!("non-finite sample {x}"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let mut atoms = Vec::with_capacity(sorted.len());
        let mut weights = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            atoms.push(sorted[i]);
            weights.push((j - i) as f64 / n);
            i = j;
        }
        Ok(Self { atoms, weights })
    }

    /// Arbitrary positive weights, normalized to total mass 1.
    pub fn from_weighted(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(domain!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            ));
        }
        if atoms.is_empty() {
            return Err(domain!("empirical measure needs at least one atom"));
        }
        for (&a, &w) in atoms.iter().zip(weights) {
            if !a.is_finite() {
                return Err(domain!("non-finite atom {a}"));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(domain!("weight {w} at atom {a} is not positive"));
            }
        }
        let mut pairs: Vec<(f64, f64)> =
            atoms.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out_a: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut out_w: Vec<NeumaierSum> = Vec::with_capacity(pairs.len());
        for (a, w) in pairs {
            match out_a.last() {
                Some(&last) if last == a => out_w.last_mut().unwrap().add(w),
                _ => {
                    out_a.push(a);
                    let mut s = NeumaierSum::new();
                    s.add(w);
                    out_w.push(s);
                }
            }
        }
        let merged: Vec<f64> = out_w.iter().map(NeumaierSum::value).collect();
        let total: f64 = merged.iter().copied().sum::<NeumaierSum>().value();
        Ok(Self {
            atoms: out_a,
            weights: merged.into_iter().map(|w| w / total).collect(),
        })
    }

    /// A single unit mass.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::from_weighted(&[x], &[1.0])
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| a * w)
            .sum::<NeumaierSum>()
            .value()
    }

    /// Writes `atom,weight` rows with round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "atom,weight")?;
        for (a, w) in self.atoms.iter().zip(&self.weights) {
            writeln!(out, "{a:e},{w:e}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty measure file".into()))??;
        if header.trim() != "atom,weight" {
            return Err(Error::Parse(format!(
                "expected header \"atom,weight\", got {header:?}"
            )));
        }
        let (mut atoms, mut weights) = (Vec::new(), Vec::new());
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || {
                Error::Parse(format!(
                    "line {}: expected atom,weight: {line:?}",
                    lineno + 2
                ))
            };
            let (a, w) = line.split_once(',').ok_or_else(bad)?;
            atoms.push(a.trim().parse::<f64>().map_err(|_| bad())?);
            weights.push(w.trim().parse::<f64>().map_err(|_| bad())?);
        }
        Self::from_weighted(&atoms, &weights)
    }
}

/// Merged sorted support of two measures with the signed mass difference
/// `μ - ν` at each point.
pub(crate) fn signed_difference(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (&mu.atoms, &nu.atoms);
    let mut pos = Vec::with_capacity(a.len() + b.len());
    let mut diff = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i] <= b[j]);
        let take_b = i == a.len() || (j < b.len() && b[j] <= a[i]);
        let x = if take_a { a[i] } else { b[j] };
        let mut d = 0.0;
        if take_a {
            d += mu.weights[i];
            i += 1;
        }
        if take_b {
            d -= nu.weights[j];
            j += 1;
        }
        pos.push(x);
        diff.push(d);
    }
    (pos, diff)
}

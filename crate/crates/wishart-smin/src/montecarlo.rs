//! Seeded sampling of the complex Wishart ensemble and its fixed-trace
//! companion, smallest-eigenvalue extraction, empirical distributions,
//! and Kolmogorov–Smirnov comparison against the closed forms.
//!
//! Reproducibility contract: draw `k` of a run keyed by `seed` uses a
//! ChaCha stream cipher RNG seeded with `seed` on stream `k`, so draws
//! are bit-reproducible, order-independent, and parallelize freely.
//! Gaussians come from the ziggurat sampler (`StandardNormal`), fixed for
//! a given dependency version.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::grid::{format_float, GridDensity, GridMetadata};
use crate::params::EnsembleParams;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// A batch of smallest-eigenvalue samples with its provenance key.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub params: EnsembleParams,
    pub fixed_trace: bool,
    pub seed: u64,
    pub count: usize,
}

impl SampleSet {
    /// Validates the structural invariants: length matches `count`, all
    /// values non-negative, fixed-trace values bounded by `1/n`.
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.count || self.count == 0 {
            return Err(Error::Shape(format!(
                "sample count mismatch: {} values for count {}",
                self.values.len(),
                self.count
            )));
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Numerical("samples must be finite and ≥ 0".into()));
        }
        if self.fixed_trace {
            let bound = 1.0 / f64::from(self.params.n) + 1e-12;
            if self.values.iter().any(|v| *v > bound) {
                return Err(Error::Numerical(format!(
                    "fixed-trace samples must lie in [0, 1/n] = [0, {bound}]"
                )));
            }
        }
        Ok(())
    }

    /// Serializes as a single-column CSV with `# key: value` metadata
    /// comment lines (floats at full round-trip precision).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# n: {}\n", self.params.n));
        out.push_str(&format!("# m: {}\n", self.params.m));
        out.push_str(&format!("# fixed_trace: {}\n", self.fixed_trace));
        out.push_str(&format!("# seed: {}\n", self.seed));
        out.push_str(&format!("# count: {}\n", self.count));
        out.push_str("value\n");
        for v in &self.values {
            out.push_str(&format_float(*v));
            out.push('\n');
        }
        out
    }

    /// Parses the format produced by [`SampleSet::to_csv_string`].
    pub fn from_csv_string(text: &str) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut values = Vec::new();
        let mut in_header = true;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let (key, value) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("malformed metadata line: {line}")))?;
                meta.insert(key.trim().to_string(), value.trim().to_string());
            } else if in_header {
                if line != "value" {
                    return Err(Error::Parse(format!(
                        "expected column header 'value', found '{line}'"
                    )));
                }
                in_header = false;
            } else {
                values.push(
                    line.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad sample '{line}': {e}")))?,
                );
            }
        }
        let get = |key: &str| {
            meta.get(key)
                .ok_or_else(|| Error::Parse(format!("missing metadata key '{key}'")))
        };
        let set = SampleSet {
            values,
            params: EnsembleParams::new(
                get("n")?.parse().map_err(|e| Error::Parse(format!("n: {e}")))?,
                get("m")?.parse().map_err(|e| Error::Parse(format!("m: {e}")))?,
            )?,
            fixed_trace: get("fixed_trace")?
                .parse()
                .map_err(|e| Error::Parse(format!("fixed_trace: {e}")))?,
            seed: get("seed")?.parse().map_err(|e| Error::Parse(format!("seed: {e}")))?,
            count: get("count")?.parse().map_err(|e| Error::Parse(format!("count: {e}")))?,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: &std::path::Path) -> Result<Self> {
        Self::from_csv_string(&std::fs::read_to_string(path)?)
    }
}

/// RNG for one draw: `seed` picks the keyed family, the draw index picks
/// the independent stream within it.
fn draw_rng(seed: u64, draw_idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw_idx);
    rng
}

/// One complex Gaussian matrix draw: independent real and imaginary parts,
/// each zero-mean with variance 1/2, so `E|A_ij|² = 1`. Entries are filled
/// row-major, two normals per entry — the layout is part of the
/// reproducibility contract.
pub fn sample_ginibre(params: EnsembleParams, seed: u64, draw_idx: u64) -> DMatrix<C64> {
    let mut rng = draw_rng(seed, draw_idx);
    let scale = 0.5f64.sqrt();
    let n = params.n as usize;
    let m = params.m as usize;
    let mut data = Vec::with_capacity(n * m);
    for _ in 0..n * m {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        data.push(C64::new(re * scale, im * scale));
    }
    DMatrix::from_row_slice(n, m, &data)
}

/// Smallest eigenvalue and trace of `W = AA†` for one draw.
fn smallest_and_trace(params: EnsembleParams, seed: u64, draw_idx: u64) -> Result<(f64, f64)> {
    let a = sample_ginibre(params, seed, draw_idx);
    let w = &a * a.adjoint();
    let trace = w.trace().re;
    let eig = w
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::Eigensolver {
            draw: draw_idx as usize,
        })?;
    let min = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    // eigenvalues of AA† are ≥ 0; clamp solver noise below zero
    Ok((min.max(0.0), trace))
}

/// Smallest-eigenvalue samples of the regular and fixed-trace ensembles,
/// drawn from the *same* matrices (one eigendecomposition per draw).
pub fn smallest_eig_sample_pair(
    params: EnsembleParams,
    count: usize,
    seed: u64,
) -> Result<(SampleSet, SampleSet)> {
    if count == 0 {
        return Err(Error::InvalidParams("sample count must be ≥ 1".into()));
    }
    let raw: Result<Vec<(f64, f64)>> = (0..count as u64)
        .into_par_iter()
        .map(|draw| smallest_and_trace(params, seed, draw))
        .collect();
    let raw = raw?;
    let regular = SampleSet {
        values: raw.iter().map(|&(min, _)| min).collect(),
        params,
        fixed_trace: false,
        seed,
        count,
    };
    let fixed = SampleSet {
        values: raw.iter().map(|&(min, trace)| min / trace).collect(),
        params,
        fixed_trace: true,
        seed,
        count,
    };
    regular.validate()?;
    fixed.validate()?;
    Ok((regular, fixed))
}

/// Smallest-eigenvalue samples of one ensemble (regular or fixed-trace).
pub fn smallest_eig_samples(
    params: EnsembleParams,
    count: usize,
    seed: u64,
    fixed_trace: bool,
) -> Result<SampleSet> {
    let (regular, fixed) = smallest_eig_sample_pair(params, count, seed)?;
    Ok(if fixed_trace { fixed } else { regular })
}

/// Kolmogorov–Smirnov statistic of the samples against an analytic CDF:
/// `sup_i max(|i/N − F(x_i)|, |(i−1)/N − F(x_i)|)` over the sorted sample.
pub fn ks_statistic(samples: &SampleSet, cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (idx, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = ((idx as f64 + 1.0) / n - f).abs();
        let below = (idx as f64 / n - f).abs();
        sup = sup.max(above).max(below);
    }
    sup
}

/// Density-normalized histogram over an explicit range. Samples outside
/// `[lo, hi]` are ignored; the included mass integrates to exactly 1.
/// Grid points are the bin centers.
pub fn histogram_range(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<GridDensity> {
    if bins < 2 {
        return Err(Error::InvalidParams("histogram needs at least 2 bins".into()));
    }
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParams(format!(
            "histogram range must be finite with hi > lo (got [{lo}, {hi}])"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::InvalidParams(
            "no samples fall inside the histogram range".into(),
        ));
    }
    let xs: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let ys: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / (total as f64 * width))
        .collect();
    GridDensity::new(
        xs,
        ys,
        GridMetadata {
            kind: "histogram".into(),
            params: None,
        },
    )
}

/// Density-normalized histogram of a sample set over its own range.
pub fn histogram(samples: &SampleSet, bins: usize) -> Result<GridDensity> {
    let lo = samples.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples
        .values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::InvalidParams(
            "histogram needs a non-degenerate sample range".into(),
        ));
    }
    let mut grid = histogram_range(&samples.values, bins, lo, hi)?;
    grid.metadata.params = Some(samples.params);
    Ok(grid)
}

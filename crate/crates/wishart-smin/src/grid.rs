//! Tabulated densities on a grid — the carrier for every curve the crate
//! can emit (closed forms, histograms, approximations), with CSV/JSON
//! export and the distance/integral helpers the comparison tests use.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::params::EnsembleParams;
use crate::{Error, Result};

/// A density sampled on a strictly increasing grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridDensity {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub metadata: GridMetadata,
}

/// What the curve is and which ensemble produced it.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GridMetadata {
    /// Curve tag, e.g. `"regular"`, `"fixed-trace"`, `"marginal-ft"`,
    /// `"tracy-widom-2"`, `"histogram"`.
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<EnsembleParams>,
}

impl GridMetadata {
    pub fn new(kind: &str, params: Option<EnsembleParams>) -> Self {
        Self {
            kind: kind.to_owned(),
            params,
        }
    }
}

impl GridDensity {
    /// Validates the grid invariants: equal lengths (≥ 2), strictly
    /// increasing finite `xs`, finite non-negative `ys`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, metadata: GridMetadata) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape(format!(
                "grid length mismatch: {} xs vs {} ys",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::Shape("grid needs at least two points".into()));
        }
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Shape(format!(
                    "grid not strictly increasing at x={} → {}",
                    w[0], w[1]
                )));
            }
        }
        for (x, y) in xs.iter().zip(&ys) {
            if !x.is_finite() || !y.is_finite() || *y < 0.0 {
                return Err(Error::Numerical(format!(
                    "invalid grid value ({x}, {y}): densities must be finite and ≥ 0"
                )));
            }
        }
        Ok(Self { xs, ys, metadata })
    }

    /// Build by evaluating a fallible density at each grid point.
    pub fn from_fn<F>(xs: Vec<f64>, metadata: GridMetadata, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
        Self::new(xs, ys, metadata)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Trapezoid-rule integral over the grid.
    pub fn trapezoid(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }

    /// Trapezoid-rule mean `∫ x ρ(x) dx` (assumes the grid covers the
    /// support well enough that the tail mass is negligible).
    pub fn mean(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (x[0] * y[0] + x[1] * y[1]) / 2.0)
            .sum()
    }

    /// Trapezoid-rule variance.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| {
                let f0 = (x[0] - mu).powi(2) * y[0];
                let f1 = (x[1] - mu).powi(2) * y[1];
                (x[1] - x[0]) * (f0 + f1) / 2.0
            })
            .sum()
    }

    /// Largest pointwise absolute difference; requires identical grids.
    pub fn sup_norm_distance(&self, other: &GridDensity) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .ys
            .iter()
            .zip(&other.ys)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Trapezoid `L¹` distance; requires identical grids.
    pub fn l1_distance(&self, other: &GridDensity) -> Result<f64> {
        self.check_same_grid(other)?;
        let diff: Vec<f64> = self
            .ys
            .iter()
            .zip(&other.ys)
            .map(|(a, b)| (a - b).abs())
            .collect();
        Ok(self
            .xs
            .windows(2)
            .zip(diff.windows(2))
            .map(|(x, d)| (x[1] - x[0]) * (d[0] + d[1]) / 2.0)
            .sum())
    }

    fn check_same_grid(&self, other: &GridDensity) -> Result<()> {
        if self.xs.len() != other.xs.len()
            || self.xs.iter().zip(&other.xs).any(|(a, b)| a != b)
        {
            return Err(Error::Shape(
                "grid comparison requires identical x grids".into(),
            ));
        }
        Ok(())
    }

    /// Two-column CSV with header `x,density`; floats at 17 significant
    /// digits so the text round-trips bit-exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,density")?;
        for (x, y) in self.xs.iter().zip(&self.ys) {
            writeln!(w, "{},{}", format_float(*x), format_float(*y))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("vec write cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("grid serializes")
    }
}

/// Format a float with 17 significant digits — enough to reproduce the
/// exact `f64` on re-parse.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Inclusive evenly spaced grid with `count ≥ 2` points: both endpoints
/// are grid points.
pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) || stop <= start {
        return Err(Error::InvalidParams(format!(
            "grid range must be finite with stop > start (got {start}..{stop})"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidParams(
            "grid needs at least two points".into(),
        ));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == count - 1 {
                stop // exact endpoint, no accumulated rounding
            } else {
                start + step * i as f64
            }
        })
        .collect())
}

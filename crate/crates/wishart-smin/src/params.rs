//! Ensemble and moment-order parameter types.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Matrix dimensions of the ensemble: `W = A A†` with `A` an `n × m`
/// complex Gaussian matrix, `m ≥ n ≥ 1`. The rectangularity is
/// `α = m − n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub n: u32,
    pub m: u32,
}

impl EnsembleParams {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be ≥ 1".into()));
        }
        if m < n {
            return Err(Error::InvalidParams(format!(
                "m must be ≥ n (got n={n}, m={m})"
            )));
        }
        Ok(Self { n, m })
    }

    /// Rectangularity `α = m − n`.
    pub fn alpha(&self) -> u32 {
        self.m - self.n
    }

    /// `n · m`, the total parameter count of the underlying Gaussian matrix.
    pub fn nm(&self) -> u64 {
        self.n as u64 * self.m as u64
    }
}

/// Moment order `η` for `⟨x^η⟩`. Real-valued; each ensemble validates the
/// convergence bound `η > −α − 1` at use time, since it depends on the
/// ensemble's rectangularity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentOrder {
    pub eta: f64,
}

impl MomentOrder {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() {
            return Err(Error::InvalidParams("moment order must be finite".into()));
        }
        Ok(Self { eta })
    }

    /// The order as an exact integer, when it is one.
    pub fn as_integer(&self) -> Option<i64> {
        if self.eta.fract() == 0.0 && self.eta.abs() < 2f64.powi(53) {
            Some(self.eta as i64)
        } else {
            None
        }
    }

    /// Check the convergence bound `η > −α − 1` for a given rectangularity.
    pub fn validate_for_alpha(&self, alpha: u32) -> Result<()> {
        let bound = -(alpha as f64) - 1.0;
        if self.eta <= bound {
            return Err(Error::InvalidParams(format!(
                "moment order η={} requires η > −α−1 = {bound}",
                self.eta
            )));
        }
        Ok(())
    }
}

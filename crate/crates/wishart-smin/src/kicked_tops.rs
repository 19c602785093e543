//! Coupled kicked tops: a deterministic Floquet map on an `N1×N2` state
//! matrix whose Schmidt spectra, in the chaotic regime, follow the
//! fixed-trace ensemble predictions.
//!
//! One period acts as `Ψ(ν) = V ∘ (U1 Ψ(ν−1) U2ᵀ)` where `∘` is the
//! Hadamard product, `U_r = exp(−i k_r a²/(2 j_r)) · d^{(j_r)}(π/2)` is a
//! kicked rotation and `V_{ab} = exp(−i ε a b/√(j1 j2))` couples the tops.
//! Everything is deterministic — there is no RNG anywhere in this module.

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::exact::factorial;
use crate::numeric::{ln_abs_bigint, ln_abs_ratio};
use crate::params::EnsembleParams;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Angular momenta (half-integers), kick strengths, and coupling of the
/// two tops. The Hilbert-space dimensions are `N_r = 2 j_r + 1`, with
/// `N1 ≤ N2` so the reduced density matrix has the smaller dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams {
    two_j1: u32,
    two_j2: u32,
    pub k1: f64,
    pub k2: f64,
    pub eps: f64,
}

impl TopParams {
    pub fn new(j1: f64, j2: f64, k1: f64, k2: f64, eps: f64) -> Result<Self> {
        let two_j1 = check_half_integer(j1)?;
        let two_j2 = check_half_integer(j2)?;
        if two_j1 > two_j2 {
            return Err(Error::InvalidParams(format!(
                "require j1 ≤ j2 (N1 ≤ N2) for the reduced-density convention, got j1={j1}, j2={j2}"
            )));
        }
        if !(k1.is_finite() && k2.is_finite() && eps.is_finite()) {
            return Err(Error::InvalidParams(
                "kick strengths and coupling must be finite".into(),
            ));
        }
        Ok(Self {
            two_j1,
            two_j2,
            k1,
            k2,
            eps,
        })
    }

    pub fn j1(&self) -> f64 {
        f64::from(self.two_j1) / 2.0
    }

    pub fn j2(&self) -> f64 {
        f64::from(self.two_j2) / 2.0
    }

    pub fn n1(&self) -> u32 {
        self.two_j1 + 1
    }

    pub fn n2(&self) -> u32 {
        self.two_j2 + 1
    }

    /// The matching Wishart shape `(n, m) = (N1, N2)`.
    pub fn ensemble(&self) -> EnsembleParams {
        EnsembleParams::new(self.n1(), self.n2()).expect("N1 ≤ N2 by construction")
    }
}

fn check_half_integer(j: f64) -> Result<u32> {
    let two_j = 2.0 * j;
    if !(j.is_finite() && two_j >= 1.0 && two_j.fract() == 0.0 && two_j <= 1e4) {
        return Err(Error::InvalidParams(format!(
            "j must be a half-integer ≥ 1/2 (got {j})"
        )));
    }
    Ok(two_j as u32)
}

/// Spherical angles of a directed-angular-momentum state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAngles {
    pub theta0: f64,
    pub phi0: f64,
}

impl CoherentAngles {
    pub fn new(theta0: f64, phi0: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta0) {
            return Err(Error::InvalidParams(format!(
                "theta0 must lie in [0, π] (got {theta0})"
            )));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi0) {
            return Err(Error::InvalidParams(format!(
                "phi0 must lie in [0, 2π) (got {phi0})"
            )));
        }
        Ok(Self { theta0, phi0 })
    }
}

/// Default initial-condition pair (per top: θ0, φ0). The trajectories they
/// seed give chaotic-regime agreement with the fixed-trace predictions and
/// strongly initial-condition-sensitive disagreement in the regular
/// regime, without accidental symmetries between the tops.
pub const PRIMARY_ANGLES: [(f64, f64); 2] = [(1.90, 2.80), (0.70, 5.10)];
/// Second default initial-condition pair.
pub const SECONDARY_ANGLES: [(f64, f64); 2] = [(0.89, 0.63), (2.30, 1.90)];

/// Schmidt eigenvalues of a pure bipartite state, descending, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtSpectrum {
    pub mu: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn smallest(&self) -> f64 {
        *self.mu.last().expect("non-empty spectrum")
    }

    pub fn largest(&self) -> f64 {
        self.mu[0]
    }
}

/// The three constant factors of one Floquet period.
#[derive(Debug, Clone)]
pub struct FloquetFactors {
    pub u1: DMatrix<C64>,
    pub u2: DMatrix<C64>,
    pub v: DMatrix<C64>,
}

/// Wigner (small) d-matrix at angle π/2 under the convention
/// `d^j_{m′,m} = ⟨j,m′| e^{−iθJ_y} |j,m⟩`, rows and columns indexed by
/// `m′, m = −j..+j` ascending.
///
/// Each entry is the exact rational binomial sum
/// `2^{−j} √((j+m′)!(j−m′)!(j+m)!(j−m)!) Σ_k (−1)^{m′−m+k} /
/// [(j+m−k)! k! (j−m′−k)! (m′−m+k)!]`
/// evaluated with big-integer factorials; only the final magnitude is
/// assembled in floating point (through logs, so large `j` cannot
/// overflow the conversion).
pub fn wigner_d_half_pi(j: f64) -> Result<DMatrix<f64>> {
    let two_j = check_half_integer_or_zero(j)?;
    let n = two_j as usize + 1;
    let mut d = DMatrix::<f64>::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            // 2m′ = 2·row − 2j, 2m = 2·col − 2j
            let jp_mp = col_count(two_j, row, true); // j + m′
            let jm_mp = col_count(two_j, row, false); // j − m′
            let jp_m = col_count(two_j, col, true);
            let jm_m = col_count(two_j, col, false);
            let mp_minus_m = row as i64 - col as i64; // m′ − m (integer)
            let k_lo = (-mp_minus_m).max(0) as u64;
            let k_hi = jp_m.min(jm_mp);
            if k_lo > k_hi {
                continue;
            }
            let mut t = BigRational::zero();
            for k in k_lo..=k_hi {
                let den = factorial(jp_m - k)
                    * factorial(k)
                    * factorial(jm_mp - k)
                    * factorial((mp_minus_m + k as i64) as u64);
                let sign = if (mp_minus_m + k as i64) % 2 == 0 { 1 } else { -1 };
                t += BigRational::new(BigInt::from(sign), den);
            }
            if t.is_zero() {
                continue;
            }
            let f = factorial(jp_mp) * factorial(jm_mp) * factorial(jp_m) * factorial(jm_m);
            let ln_t = ln_abs_ratio(t.numer(), t.denom()).expect("nonzero");
            let ln_f = ln_abs_bigint(&f).expect("positive");
            let ln_val = ln_t
                .add(ln_f.mul_f64(0.5))
                .add_f64(-f64::from(two_j) / 2.0 * std::f64::consts::LN_2);
            let sign = if t.is_positive() { 1.0 } else { -1.0 };
            d[(row, col)] = sign * ln_val.value().exp();
        }
    }
    Ok(d)
}

fn check_half_integer_or_zero(j: f64) -> Result<u32> {
    let two_j = 2.0 * j;
    if !(j.is_finite() && two_j >= 0.0 && two_j.fract() == 0.0 && two_j <= 1e4) {
        return Err(Error::InvalidParams(format!(
            "j must be a non-negative half-integer (got {j})"
        )));
    }
    Ok(two_j as u32)
}

/// `j ± m` for the ascending index `i` (`m = i − j`), always a
/// non-negative integer.
fn col_count(two_j: u32, i: usize, plus: bool) -> u64 {
    if plus {
        i as u64
    } else {
        u64::from(two_j) - i as u64
    }
}

/// The Floquet factors `U1`, `U2` (unitary) and the coupling mask `V`
/// (entrywise unimodular).
pub fn floquet_factors(params: &TopParams) -> Result<FloquetFactors> {
    let d1 = wigner_d_half_pi(params.j1())?;
    let d2 = wigner_d_half_pi(params.j2())?;
    let a1 = index_values(params.two_j1);
    let a2 = index_values(params.two_j2);
    let u1 = kicked_rotation(&d1, &a1, params.k1, params.j1());
    let u2 = kicked_rotation(&d2, &a2, params.k2, params.j2());
    let scale = params.eps / (params.j1() * params.j2()).sqrt();
    let v = DMatrix::from_fn(a1.len(), a2.len(), |r, c| {
        C64::from_polar(1.0, -scale * a1[r] * a2[c])
    });
    Ok(FloquetFactors { u1, u2, v })
}

/// Magnetic quantum numbers `−j..+j` ascending.
fn index_values(two_j: u32) -> Vec<f64> {
    let j = f64::from(two_j) / 2.0;
    (0..=two_j).map(|i| f64::from(i) - j).collect()
}

/// `U = diag(exp(−i k a²/(2j))) · d(π/2)`.
fn kicked_rotation(d: &DMatrix<f64>, a: &[f64], k: f64, j: f64) -> DMatrix<C64> {
    DMatrix::from_fn(a.len(), a.len(), |r, c| {
        C64::from_polar(1.0, -k * a[r] * a[r] / (2.0 * j)) * d[(r, c)]
    })
}

/// Spin-coherent state `⟨j,m|θ0,φ0⟩ = (1+|γ|²)^{−j} γ^{j−m} √C(2j, j+m)`
/// with `γ = e^{iφ0} tan(θ0/2)`, indexed `m = −j..+j` ascending.
/// Magnitudes are assembled in the log domain so polar angles arbitrarily
/// close to π (where `tan(θ0/2)` explodes) stay finite.
pub fn coherent_state(j: f64, angles: CoherentAngles) -> Result<DVector<C64>> {
    let two_j = check_half_integer_or_zero(j)?;
    let n = two_j as usize + 1;
    let t = (angles.theta0 / 2.0).tan();
    let jf = f64::from(two_j) / 2.0;
    let mut chi = DVector::<C64>::zeros(n);
    for i in 0..n {
        let p = (two_j as usize - i) as u32; // j − m
        if t == 0.0 {
            // pole: all weight on m = +j
            if p == 0 {
                chi[i] = C64::new(1.0, 0.0);
            }
            continue;
        }
        let binom = factorial(u64::from(two_j))
            / (factorial(i as u64) * factorial(u64::from(two_j) - i as u64));
        let ln_binom = ln_abs_bigint(&BigInt::from(binom)).expect("positive").value();
        let ln_mag = f64::from(p) * t.ln() - jf * t.mul_add(t, 1.0).ln() + 0.5 * ln_binom;
        chi[i] = C64::from_polar(ln_mag.exp(), f64::from(p) * angles.phi0);
    }
    Ok(chi)
}

/// Initial product state `Ψ(0) = χ1 χ2ᵀ` of the two coherent states.
pub fn product_state(
    params: &TopParams,
    angles1: CoherentAngles,
    angles2: CoherentAngles,
) -> Result<DMatrix<C64>> {
    let chi1 = coherent_state(params.j1(), angles1)?;
    let chi2 = coherent_state(params.j2(), angles2)?;
    Ok(chi1 * chi2.transpose())
}

/// One Floquet period `Ψ → V ∘ (U1 Ψ U2ᵀ)`. Frobenius-norm preserving
/// (unitary factors, unimodular mask).
pub fn step(psi: &DMatrix<C64>, factors: &FloquetFactors) -> Result<DMatrix<C64>> {
    if psi.nrows() != factors.u1.nrows() || psi.ncols() != factors.u2.nrows() {
        return Err(Error::Shape(format!(
            "state is {}×{} but factors expect {}×{}",
            psi.nrows(),
            psi.ncols(),
            factors.u1.nrows(),
            factors.u2.nrows()
        )));
    }
    let rotated = &factors.u1 * psi * factors.u2.transpose();
    Ok(rotated.component_mul(&factors.v))
}

/// Schmidt spectrum of a unit-norm state: eigenvalues of `ΨΨ†`, clamped
/// to `[0, 1]`, descending, renormalized to sum exactly 1 (an error if the
/// raw sum strays beyond 1e−10 from 1).
pub fn schmidt_spectrum(psi: &DMatrix<C64>) -> Result<SchmidtSpectrum> {
    let rho = psi * psi.adjoint();
    let eig = rho
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::Eigensolver { draw: 0 })?;
    let mut mu: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    mu.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let sum: f64 = mu.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "Schmidt eigenvalues sum to {sum}, expected 1 (state not normalized?)"
        )));
    }
    for v in &mut mu {
        *v /= sum;
    }
    Ok(SchmidtSpectrum { mu })
}

/// Result of an ensemble run: the recorded spectra plus the number of
/// norm renormalizations that were applied along the trajectory.
#[derive(Debug, Clone)]
pub struct EnsembleRun {
    pub spectra: Vec<SchmidtSpectrum>,
    pub renormalizations: usize,
}

impl EnsembleRun {
    /// Smallest Schmidt eigenvalue of each recorded state.
    pub fn smallest_values(&self) -> Vec<f64> {
        self.spectra.iter().map(SchmidtSpectrum::smallest).collect()
    }

    /// All Schmidt eigenvalues pooled, state by state.
    pub fn pooled_values(&self) -> Vec<f64> {
        self.spectra.iter().flat_map(|s| s.mu.iter().copied()).collect()
    }
}

/// Evolves the coherent product state, discards the first `skip` periods,
/// then records every `stride`-th state's Schmidt spectrum until `count`
/// spectra are collected. The trajectory is sequential; spectrum
/// extraction is parallel. The state is renormalized every 100 periods
/// when its norm has drifted by more than 1e−12.
pub fn run_ensemble(
    params: &TopParams,
    angles1: CoherentAngles,
    angles2: CoherentAngles,
    skip: usize,
    stride: usize,
    count: usize,
) -> Result<EnsembleRun> {
    if stride == 0 || count == 0 {
        return Err(Error::InvalidParams(
            "stride and count must be ≥ 1".into(),
        ));
    }
    let factors = floquet_factors(params)?;
    let mut psi = product_state(params, angles1, angles2)?;
    let total = skip + stride * count;
    let mut recorded = Vec::with_capacity(count);
    let mut renormalizations = 0usize;
    for nu in 1..=total {
        psi = step(&psi, &factors)?;
        if nu % 100 == 0 {
            let norm = psi.norm();
            if (norm - 1.0).abs() > 1e-12 {
                psi /= C64::new(norm, 0.0);
                renormalizations += 1;
            }
        }
        if nu > skip && (nu - skip) % stride == 0 {
            recorded.push(psi.clone());
        }
    }
    let spectra: Result<Vec<SchmidtSpectrum>> = recorded
        .par_iter()
        .enumerate()
        .map(|(idx, state)| {
            schmidt_spectrum(state).map_err(|e| match e {
                Error::Eigensolver { .. } => Error::Eigensolver { draw: idx },
                other => other,
            })
        })
        .collect();
    Ok(EnsembleRun {
        spectra: spectra?,
        renormalizations,
    })
}

/// Cluster-robust z-scores for a pooled-eigenvalue histogram: one recorded
/// state is one cluster (its eigenvalues are coupled by the trace rule and
/// consecutive states are correlated, so i.i.d. standard errors would be
/// wrong). For each bin, `z = (observed − expected)/SE` with
/// `SE = √(S · Var_states(per-state count))` over the `S` states.
/// `expected_probability[b]` is the analytic probability mass of bin `b`
/// (per eigenvalue); `edges` has one more entry than bins.
pub fn cluster_z_scores(
    spectra: &[SchmidtSpectrum],
    edges: &[f64],
    expected_probability: &[f64],
) -> Result<Vec<f64>> {
    if edges.len() != expected_probability.len() + 1 || edges.len() < 2 {
        return Err(Error::Shape(format!(
            "{} edges do not bound {} bins",
            edges.len(),
            expected_probability.len()
        )));
    }
    if spectra.len() < 2 {
        return Err(Error::InvalidParams(
            "need at least two states for a cluster variance".into(),
        ));
    }
    let states = spectra.len() as f64;
    let per_value = spectra.iter().map(|s| s.mu.len()).sum::<usize>() as f64;
    let mut out = Vec::with_capacity(expected_probability.len());
    for (b, &prob) in expected_probability.iter().enumerate() {
        let (lo, hi) = (edges[b], edges[b + 1]);
        let per_state: Vec<f64> = spectra
            .iter()
            .map(|s| s.mu.iter().filter(|&&v| v >= lo && v < hi).count() as f64)
            .collect();
        let total: f64 = per_state.iter().sum();
        let mean = total / states;
        let var = per_state.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (states - 1.0);
        let se = (var * states).max(1e-9).sqrt();
        let expected = prob * per_value;
        out.push((total - expected) / se);
    }
    Ok(out)
}

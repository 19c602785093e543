//! One-level (marginal) eigenvalue densities.
//!
//! * Regular ensemble: the Wronskian-like two-term Laguerre form
//!   `p(λ) = (Γ(n)/Γ(m)) e^{−λ} λ^α [L_{n−1}^{(α)} L_n^{(α+1)} − L_n^{(α)} L_{n−1}^{(α+1)}]`,
//!   with the kernel-diagonal sum of squared Laguerre polynomials as an
//!   independent cross-check. Polynomial values come from the bit-scaled
//!   upward recurrence so large arguments cannot overflow.
//! * Fixed-trace ensemble: a single sum over terminating Gauss
//!   hypergeometric functions. Both hypergeometric entries terminate
//!   (their first parameters are non-positive integers), and every other
//!   ingredient is rational, so at a dyadic argument the whole density is
//!   evaluated in exact rational arithmetic — the alternating terms span
//!   enough orders of magnitude (values reach 1e−150) that no floating
//!   summation would survive.
//! * Approximations: the pure rescaling `p̃(μ) = mn·p(mn μ)` and the
//!   Marčenko–Pastur law with edges `μ± = (1 ± √(n/m))²/n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use statrs::function::gamma::ln_gamma;

use crate::exact::{gamma_int, gamma_ratio};
use crate::laguerre::{laguerre_polynomial_exact, laguerre_values_scaled, Scaled};
use crate::numeric::{f64_to_rational, rational_to_f64};
use crate::params::EnsembleParams;
use crate::rational::{Rational, RationalPolynomial};
use crate::{Error, Result};

/// Marginal density of the regular ensemble at `λ ≥ 0` (Wronskian form).
pub fn marginal_regular(params: EnsembleParams, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "marginal density argument must be ≥ 0 (got {lambda})"
        )));
    }
    let n = params.n;
    let alpha = f64::from(params.alpha());
    let l_lo = laguerre_values_scaled(n, alpha, lambda);
    let l_hi = laguerre_values_scaled(n, alpha + 1.0, lambda);
    let bracket = l_lo[n as usize - 1]
        .mul(l_hi[n as usize])
        .sub(l_lo[n as usize].mul(l_hi[n as usize - 1]));
    if lambda == 0.0 {
        if params.alpha() > 0 {
            return Ok(0.0);
        }
        // α = 0 ⇒ Γ(n)/Γ(m) = 1 and e^{−λ} λ^α = 1.
        return Ok(bracket.to_f64().max(0.0));
    }
    let Some(ln_bracket) = bracket.ln_abs() else {
        return Ok(0.0);
    };
    let ln_value = ln_gamma(f64::from(n)) - ln_gamma(f64::from(params.m))
        + alpha * lambda.ln()
        - lambda
        + ln_bracket;
    Ok((bracket.signum() * ln_value.exp()).max(0.0))
}

/// Marginal density of the regular ensemble by the kernel-diagonal sum
/// `p(λ) = (1/n) e^{−λ} λ^α Σ_{j=0}^{n−1} [Γ(j+1)/Γ(j+α+1)] (L_j^{(α)}(λ))²`.
///
/// All terms are non-negative — no cancellation is possible — which makes
/// this the natural cross-check for the Wronskian form.
pub fn marginal_regular_sum(params: EnsembleParams, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "marginal density argument must be ≥ 0 (got {lambda})"
        )));
    }
    let n = params.n;
    let alpha = f64::from(params.alpha());
    let values = laguerre_values_scaled(n - 1, alpha, lambda);
    let mut sum = Scaled::zero();
    for (j, lj) in values.iter().enumerate() {
        let ln_ratio = ln_gamma(j as f64 + 1.0) - ln_gamma(j as f64 + alpha + 1.0);
        sum = sum.add(lj.mul(*lj).mul_f64(ln_ratio.exp()));
    }
    if lambda == 0.0 {
        if params.alpha() > 0 {
            return Ok(0.0);
        }
        return Ok(sum.to_f64() / f64::from(n));
    }
    let Some(ln_sum) = sum.ln_abs() else {
        return Ok(0.0);
    };
    let ln_value = ln_sum + alpha * lambda.ln() - lambda - f64::from(n).ln();
    Ok(ln_value.exp())
}

/// Scaled approximation to the fixed-trace marginal:
/// `p̃(μ) = mn · p(mn·μ)`.
pub fn marginal_scaled(params: EnsembleParams, mu: f64) -> Result<f64> {
    let mn = params.nm() as f64;
    Ok(mn * marginal_regular(params, mn * mu)?)
}

/// Spectral edges `μ± = (1 ± √(n/m))² / n` of the Marčenko–Pastur law in
/// the fixed-trace scaling.
pub fn mp_edges(params: EnsembleParams) -> (f64, f64) {
    let r = (f64::from(params.n) / f64::from(params.m)).sqrt();
    let n = f64::from(params.n);
    ((1.0 - r).powi(2) / n, (1.0 + r).powi(2) / n)
}

/// Marčenko–Pastur density `(m/2π) √((μ₊−μ)(μ−μ₋)) / μ` on `[μ₋, μ₊]`,
/// zero outside.
pub fn marginal_mp(params: EnsembleParams, mu: f64) -> f64 {
    let (lo, hi) = mp_edges(params);
    if !(mu > lo && mu < hi) {
        return 0.0;
    }
    f64::from(params.m) / (2.0 * std::f64::consts::PI) * ((hi - mu) * (mu - lo)).sqrt() / mu
}

// ---------------------------------------------------------------------------
// Fixed-trace marginal: exact rational evaluation.
// ---------------------------------------------------------------------------

/// Terminating Gauss hypergeometric sum `₂F₁(a, b; c; z)` with `a` a
/// non-positive integer, everything exact. `c ≥ 1` integer.
fn hyp2f1_terminating(a: i64, b: i64, c: i64, z: &BigRational) -> BigRational {
    debug_assert!(a <= 0 && c >= 1);
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut k: i64 = 0;
    while a + k < 0 {
        // t_{k+1} = t_k (a+k)(b+k) / ((c+k)(k+1)) · z
        let num = BigInt::from(a + k) * BigInt::from(b + k);
        let den = BigInt::from(c + k) * BigInt::from(k + 1);
        term = term * BigRational::new(num, den) * z;
        sum += &term;
        k += 1;
    }
    sum
}

/// Exact fixed-trace marginal density at a rational `μ ∈ [0, 1)`:
///
/// ```text
/// p_F(μ) = Σ_{i=0}^{n−1} K_i μ^{i+α} (1−μ)^{nm−α−i−2}
///          [ n·F(1−n) − (n−i−1)·F(−n) ] / Γ(α+1),
/// F(a) = ₂F₁(a, i−nm+α+1; α+1; −μ/(1−μ)),
/// K_i  = (−1)^i Γ(m+1)Γ(nm) / (n Γ(i+1)Γ(n−i)Γ(i+α+2)Γ(nm−α−i−1)).
/// ```
///
/// Every ingredient is rational (both hypergeometric series terminate), so
/// the value is exact; the alternating hypergeometric terms cancel through
/// dozens of orders of magnitude at large `nm`, which is precisely why
/// this is not computed in floating point.
pub fn marginal_ft_exact(params: EnsembleParams, mu: &BigRational) -> Result<Rational> {
    if params.n == 1 {
        return Err(Error::InvalidParams(
            "fixed-trace marginal is a unit point mass for n = 1; no density exists".into(),
        ));
    }
    if mu < &BigRational::zero() || mu >= &BigRational::one() {
        return Err(Error::InvalidParams(format!(
            "fixed-trace marginal argument must lie in [0, 1) (got {mu})"
        )));
    }
    let n = i64::from(params.n);
    let m = i64::from(params.m);
    let alpha = i64::from(params.alpha());
    let nm = n * m;
    let one_minus = BigRational::one() - mu;
    let z = -(mu / &one_minus);
    let mut total = BigRational::zero();
    for i in 0..n {
        let b = i - nm + alpha + 1;
        let f1 = hyp2f1_terminating(1 - n, b, alpha + 1, &z);
        let f2 = hyp2f1_terminating(-n, b, alpha + 1, &z);
        let bracket =
            BigRational::from_integer(n.into()) * f1 - BigRational::from_integer((n - 1 - i).into()) * f2;
        if bracket.is_zero() {
            continue;
        }
        let k_num = gamma_int((m + 1) as u64) * gamma_int(nm as u64);
        let k_den = BigInt::from(n)
            * gamma_int((i + 1) as u64)
            * gamma_int((n - i) as u64)
            * gamma_int((i + alpha + 2) as u64)
            * gamma_int((nm - alpha - i - 1) as u64)
            * gamma_int((alpha + 1) as u64); // the regularizing Γ(c)
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let coef = BigRational::new(BigInt::from(sign) * k_num, k_den);
        let powers = pow_rat(mu, (i + alpha) as u64) * pow_rat(&one_minus, (nm - alpha - i - 2) as u64);
        total += coef * powers * bracket;
    }
    Ok(Rational(total))
}

/// Fixed-trace marginal at a floating `μ` (evaluated exactly at its dyadic
/// value, then rounded once).
pub fn marginal_ft(params: EnsembleParams, mu: f64) -> Result<f64> {
    if !mu.is_finite() {
        return Err(Error::InvalidParams(format!(
            "fixed-trace marginal argument must be finite (got {mu})"
        )));
    }
    let r = marginal_ft_exact(params, &f64_to_rational(mu))?;
    Ok(rational_to_f64(&r.0))
}

/// Independent route to the same density: expand the regular marginal as
/// `p(λ) = e^{−λ} Σ_k b_k λ^{k+α}` (exact Laguerre-square coefficients)
/// and map each power term into the fixed-trace ensemble:
///
/// ```text
/// p_F(μ) = Γ(nm) Σ_k b_k μ^{k+α} (1−μ)^{nm−k−α−2} / Γ(nm−k−α−1).
/// ```
///
/// Used as a structural cross-check of [`marginal_ft_exact`]; the two are
/// algebraically identical and must agree as exact rationals.
pub fn marginal_ft_alt_exact(params: EnsembleParams, mu: &BigRational) -> Result<Rational> {
    if params.n == 1 {
        return Err(Error::InvalidParams(
            "fixed-trace marginal is a unit point mass for n = 1; no density exists".into(),
        ));
    }
    if mu < &BigRational::zero() || mu >= &BigRational::one() {
        return Err(Error::InvalidParams(format!(
            "fixed-trace marginal argument must lie in [0, 1) (got {mu})"
        )));
    }
    let n = params.n;
    let alpha = u64::from(params.alpha());
    let nm = params.nm();
    // b_k: coefficients of (1/n) Σ_j [Γ(j+1)/Γ(j+α+1)] (L_j^{(α)})².
    let mut b = vec![BigRational::zero(); 2 * (n as usize - 1) + 1];
    for j in 0..n {
        let lj = laguerre_polynomial_exact(j, params.alpha());
        let sq = lj.mul(&lj);
        let ratio = gamma_ratio(u64::from(j) + 1, u64::from(j) + alpha + 1)
            / BigRational::from_integer(BigInt::from(n));
        for (k, c) in sq.coeffs().iter().enumerate() {
            b[k] += c * &ratio;
        }
    }
    let one_minus = BigRational::one() - mu;
    let gamma_nm = gamma_int(nm);
    let mut total = BigRational::zero();
    for (k, bk) in b.iter().enumerate() {
        if bk.is_zero() {
            continue;
        }
        let e = nm - k as u64 - alpha - 2; // ≥ 0 since k ≤ 2(n−1)
        let coef = BigRational::new(gamma_nm.clone(), gamma_int(nm - k as u64 - alpha - 1));
        total += coef * bk * pow_rat(mu, k as u64 + alpha) * pow_rat(&one_minus, e);
    }
    Ok(Rational(total))
}

/// The fixed-trace marginal expanded as one exact polynomial in `μ` of
/// degree `nm − 2` (its support is exactly `[0, 1]`):
///
/// ```text
/// p_F(μ) = Γ(nm) Σ_k b_k μ^{k+α} (1−μ)^{nm−k−α−2} / Γ(nm−k−α−1)
/// ```
///
/// with the `(1−μ)` powers expanded binomially. The expansion makes
/// integrals over subintervals exact beta-type sums, which is how the
/// normalization, mean and histogram-bin masses below avoid both
/// quadrature error and the catastrophic alternating cancellation that
/// rules out floating-point evaluation of this polynomial.
pub fn marginal_ft_polynomial(params: EnsembleParams) -> Result<RationalPolynomial> {
    if params.n == 1 {
        return Err(Error::InvalidParams(
            "fixed-trace marginal is a unit point mass for n = 1; no density exists".into(),
        ));
    }
    let n = params.n;
    let alpha = u64::from(params.alpha());
    let nm = params.nm();
    let mut b = vec![BigRational::zero(); 2 * (n as usize - 1) + 1];
    for j in 0..n {
        let lj = laguerre_polynomial_exact(j, params.alpha());
        let sq = lj.mul(&lj);
        let ratio = gamma_ratio(u64::from(j) + 1, u64::from(j) + alpha + 1)
            / BigRational::from_integer(BigInt::from(n));
        for (k, c) in sq.coeffs().iter().enumerate() {
            b[k] += c * &ratio;
        }
    }
    let gamma_nm = gamma_int(nm);
    // (1−μ)^{e} for the largest exponent e = nm−α−2, then one synthetic
    // division by (1−μ) per unit drop in the exponent.
    let e_max = nm - alpha - 2;
    let mut pw = binomial_one_minus(e_max);
    let mut total = RationalPolynomial::zero();
    for (k, bk) in b.iter().enumerate() {
        if k > 0 {
            pw = divide_by_one_minus(&pw);
        }
        if bk.is_zero() {
            continue;
        }
        let coef = BigRational::new(gamma_nm.clone(), gamma_int(nm - k as u64 - alpha - 1)) * bk;
        total = total.add(&pw.scale(&coef).shift_up(k + alpha as usize));
    }
    Ok(total)
}

/// Coefficients of `(1−μ)^e` via the incremental binomial row.
fn binomial_one_minus(e: u64) -> RationalPolynomial {
    let mut coeffs = Vec::with_capacity(e as usize + 1);
    let mut c = BigInt::one();
    for i in 0..=e {
        let signed = if i % 2 == 0 { c.clone() } else { -c.clone() };
        coeffs.push(BigRational::from_integer(signed));
        if i < e {
            c = c * BigInt::from(e - i) / BigInt::from(i + 1);
        }
    }
    RationalPolynomial::from_coeffs(coeffs)
}

/// Exact synthetic division of a polynomial with root 1 by `(1−μ)`.
fn divide_by_one_minus(p: &RationalPolynomial) -> RationalPolynomial {
    let c = p.coeffs();
    let mut out = vec![BigRational::zero(); c.len().saturating_sub(1)];
    // p(μ) = (1−μ) q(μ) ⇒ q_k = p_k + q_{k−1}, accumulated from below.
    let mut carry = BigRational::zero();
    for k in 0..out.len() {
        carry += &c[k];
        out[k] = carry.clone();
    }
    RationalPolynomial::from_coeffs(out)
}

/// Exact moment `∫₀¹ μ^power · p_F(μ) dμ` of the fixed-trace marginal via
/// term-by-term integration of the expanded polynomial. `power = 0` must
/// give exactly 1 and `power = 1` exactly `1/n` (the trace rule).
pub fn marginal_ft_moment_exact(params: EnsembleParams, power: u64) -> Result<Rational> {
    let poly = marginal_ft_polynomial(params)?;
    let mut total = BigRational::zero();
    for (d, c) in poly.coeffs().iter().enumerate() {
        if !c.is_zero() {
            total += c / BigRational::from_integer(BigInt::from(d as u64 + power + 1));
        }
    }
    Ok(Rational(total))
}

/// Exact probability masses of the fixed-trace marginal over consecutive
/// bins `[edges[i], edges[i+1])`, computed from the antiderivative of the
/// expanded polynomial at the exact rational images of the edges, then
/// rounded once to `f64`.
pub fn marginal_ft_bin_probabilities(params: EnsembleParams, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParams(
            "bin edges must be strictly increasing with at least two entries".into(),
        ));
    }
    if edges[0] < 0.0 || *edges.last().expect("non-empty") > 1.0 {
        return Err(Error::InvalidParams(
            "bin edges must lie within the support [0, 1]".into(),
        ));
    }
    let poly = marginal_ft_polynomial(params)?;
    let anti = RationalPolynomial::from_coeffs(
        std::iter::once(BigRational::zero())
            .chain(poly.coeffs().iter().enumerate().map(|(d, c)| {
                c / BigRational::from_integer(BigInt::from(d as u64 + 1))
            }))
            .collect(),
    );
    let values: Vec<BigRational> = edges
        .iter()
        .map(|&e| anti.eval_rational(&f64_to_rational(e)))
        .collect();
    Ok(values
        .windows(2)
        .map(|w| rational_to_f64(&(&w[1] - &w[0])))
        .collect())
}

fn pow_rat(base: &BigRational, exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// Integral of the Marčenko–Pastur density over its support by the
/// substitution `μ = μ₋ + (μ₊−μ₋) sin²θ`, which removes both square-root
/// edge singularities (the integrand becomes smooth in `θ`, including the
/// hard-edge case `μ₋ = 0`). `points` trapezoid nodes in `θ`.
pub fn mp_normalization_integral(params: EnsembleParams, points: usize) -> f64 {
    let (lo, hi) = mp_edges(params);
    let width = hi - lo;
    let m = f64::from(params.m);
    let h = std::f64::consts::FRAC_PI_2 / (points - 1) as f64;
    let mut sum = 0.0;
    for idx in 0..points {
        let theta = h * idx as f64;
        let (s, c) = theta.sin_cos();
        let mu = lo + width * s * s;
        // ρ(μ)·dμ/dθ with the √ factors cancelled analytically:
        // √((μ₊−μ)(μ−μ₋)) = width·s·c  and  dμ/dθ = 2·width·s·c.
        let f = if mu == 0.0 {
            // hard edge (n = m): limit of the integrand is m·width/π
            m * width / std::f64::consts::PI
        } else {
            m / (2.0 * std::f64::consts::PI) * (width * s * c) / mu * 2.0 * width * s * c
        };
        let w = if idx == 0 || idx == points - 1 { 0.5 } else { 1.0 };
        sum += w * f;
    }
    sum * h
}

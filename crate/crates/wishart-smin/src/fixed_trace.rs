//! Smallest-eigenvalue density for the fixed-trace ensemble
//! `F = W / tr W` (the Schmidt-coefficient ensemble of random bipartite
//! pure states), obtained term-by-term from the regular-ensemble series:
//!
//! ```text
//! f_F(x) = Γ(nm) Σ_j h_j (1 − nx)^{nm−j−1} x^{j−1} / Γ(nm−j),   x ∈ [0, 1/n],
//! ```
//!
//! zero outside the support. The `h_j` are exactly those of the regular
//! form; each term integrates to `h_j Γ(j)Γ(nm−j)/(n^j Γ(nm))` against the
//! prefactor, so unit normalization carries over term by term.
//!
//! Also here: moments through the exact ratio `Γ(nm)/Γ(nm+η)`, the
//! near-edge tail mass `R(δ)` in exact rational arithmetic (its values
//! reach 1e−91, far below what `1 − cdf` could resolve in doubles), the
//! large-`m` scaled approximation, and an independently derived `α = 1`
//! coefficient cross-check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;
use statrs::function::beta::beta_reg;
use statrs::function::gamma::{ln_gamma, ln_gamma as lgamma};

use crate::exact::{
    bigint_pow, gamma_int, gamma_ratio, smin_closed_form, MomentValue, SminClosedForm,
};
use crate::numeric::{
    big_ratio_to_f64, f64_to_rational, ln_abs_ratio, CompensatedSum, Dd,
};
use crate::params::{EnsembleParams, MomentOrder};
use crate::rational::{Rational, RationalPolynomial};
use crate::{Error, Result};

/// Exponent below which `exp` underflows to zero in `f64`.
const EXP_UNDERFLOW: f64 = -745.0;

const CANCELLATION_LIMIT: f64 = 1e6;

/// Fixed-trace closed form. `n = 1` is a genuine special case: the single
/// eigenvalue is pinned at `tr W / tr W = 1`, a point mass with no density,
/// so it gets a distinguished marker instead of a [`FtClosedForm`].
#[derive(Clone, Debug)]
pub enum FtForm {
    /// `n = 1`: point mass at 1. Carries `m` for context.
    Degenerate { m: u32 },
    /// `n ≥ 2`: proper density on `[0, 1/n]`.
    Density(FtClosedForm),
}

impl FtForm {
    pub fn as_density(&self) -> Option<&FtClosedForm> {
        match self {
            FtForm::Degenerate { .. } => None,
            FtForm::Density(f) => Some(f),
        }
    }

    /// Density value (0 everywhere for the point-mass case — the mass sits
    /// in the atom, not in a density).
    pub fn eval_ft_density(&self, x: f64) -> f64 {
        match self {
            FtForm::Degenerate { .. } => 0.0,
            FtForm::Density(f) => f.eval_ft_density(x),
        }
    }

    /// Distribution function; for the point mass, a unit step at 1.
    pub fn ft_cdf(&self, x: f64) -> f64 {
        match self {
            FtForm::Degenerate { .. } => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FtForm::Density(f) => f.ft_cdf(x),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            FtForm::Degenerate { m } => json!({
                "n": 1, "m": m, "kind": "fixed-trace", "degenerate": true,
                "coeffs": Vec::<serde_json::Value>::new(),
            }),
            FtForm::Density(f) => f.to_json(),
        }
    }
}

/// Build the fixed-trace closed form for the given dimensions.
pub fn ft_closed_form(params: EnsembleParams) -> Result<FtForm> {
    if params.n == 1 {
        return Ok(FtForm::Degenerate { m: params.m });
    }
    Ok(FtForm::Density(FtClosedForm::new(params)?))
}

/// The `n ≥ 2` fixed-trace density with cached per-term log coefficients.
#[derive(Clone, Debug)]
pub struct FtClosedForm {
    base: SminClosedForm,
    /// `ln|Γ(nm) h_j / Γ(nm−j)|` per term, assembled in double-double.
    ln_coef: Vec<f64>,
    /// `Γ(nm) h_j / Γ(nm−j)` rounded to `f64`, for the direct
    /// small-parameter path.
    coef_f64: Vec<f64>,
}

impl FtClosedForm {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        if params.n < 2 {
            return Err(Error::InvalidParams(
                "fixed-trace density requires n ≥ 2 (n = 1 is a point mass)".into(),
            ));
        }
        let base = smin_closed_form(params)?;
        let nm = params.nm();
        // ln(Γ(nm)/Γ(nm−j)) built incrementally: add ln(nm−j) when j grows.
        let mut ln_rising = Dd::from_f64(0.0);
        let mut prev_j = 0u64;
        let (_, ln_abs) = base.ln_terms();
        let mut ln_coef = Vec::with_capacity(ln_abs.len());
        for (k, lh) in ln_abs.iter().enumerate() {
            let j = base.j_min() + k as u64;
            for jj in prev_j + 1..=j {
                ln_rising = ln_rising.add_f64(((nm - jj) as f64).ln());
            }
            prev_j = j;
            ln_coef.push(ln_rising.value() + lh);
        }
        let coef_f64 = {
            let (h_num, h_den) = base.h_shared();
            let j0 = base.j_min();
            let mut rising: BigInt = (nm - j0..nm).map(BigInt::from).product();
            let mut out = Vec::with_capacity(h_num.len());
            for (k, hk) in h_num.iter().enumerate() {
                out.push(big_ratio_to_f64(&(hk * &rising), h_den));
                if k + 1 < h_num.len() {
                    rising *= BigInt::from(nm - j0 - k as u64 - 1);
                }
            }
            out
        };
        Ok(Self {
            base,
            ln_coef,
            coef_f64,
        })
    }

    pub fn params(&self) -> EnsembleParams {
        self.base.params()
    }

    /// The underlying regular-ensemble form (shares the `h_j`).
    pub fn base(&self) -> &SminClosedForm {
        &self.base
    }

    /// Support `[0, 1/n]`.
    pub fn support_upper(&self) -> f64 {
        1.0 / f64::from(self.params().n)
    }

    /// Per-term exponent pair `(j−1, nm−j−1)` for the `x` and `(1−nx)`
    /// powers.
    pub fn exponent_pair(&self, j: u64) -> (u64, u64) {
        (j - 1, self.params().nm() - j - 1)
    }

    /// Density at `x`; zero outside `[0, 1/n]` (no error — the support
    /// indicator is part of the definition).
    pub fn eval_ft_density(&self, x: f64) -> f64 {
        let n = f64::from(self.params().n);
        let u = 1.0 - n * x;
        if x < 0.0 || u <= 0.0 || !x.is_finite() {
            // Smallest edge power is nm − j_max − 1 = n² − 2 ≥ 2 here, so
            // the density vanishes continuously at the right edge too.
            return 0.0;
        }
        if x == 0.0 {
            return if self.params().alpha() == 0 {
                // single j=1 term: Γ(nm) h_1 / Γ(nm−1) = n (nm−1)
                n * (self.params().nm() - 1) as f64
            } else {
                0.0
            };
        }
        if self.params().nm() <= crate::exact::DIRECT_EVAL_MAX_NM {
            let v = self.eval_direct(x, u);
            if v.is_finite() {
                return v.max(0.0);
            }
        }
        let ln_x = x.ln();
        let ln_u = u.ln();
        let nm = self.params().nm();
        let j0 = self.base.j_min();
        let (signs, _) = self.base.ln_terms();
        let mut ln_max = f64::NEG_INFINITY;
        let exponents: Vec<f64> = self
            .ln_coef
            .iter()
            .enumerate()
            .map(|(k, lc)| {
                let j = j0 + k as u64;
                let e = lc + (j - 1) as f64 * ln_x + (nm - j - 1) as f64 * ln_u;
                if e > ln_max {
                    ln_max = e;
                }
                e
            })
            .collect();
        if ln_max == f64::NEG_INFINITY || ln_max < EXP_UNDERFLOW {
            return 0.0;
        }
        let mut sum = CompensatedSum::new();
        for (e, s) in exponents.iter().zip(signs) {
            if *s != 0 {
                sum.add(f64::from(*s) * (e - ln_max).exp());
            }
        }
        let v = sum.value();
        if sum.cancellation() > CANCELLATION_LIMIT || v < 0.0 {
            return self.eval_exact_fallback(x);
        }
        ln_max.exp() * v
    }

    /// Direct double-precision term summation (small `nm` only).
    fn eval_direct(&self, x: f64, u: f64) -> f64 {
        let nm = self.params().nm();
        let j0 = self.base.j_min();
        let mut acc = 0.0;
        for (k, c) in self.coef_f64.iter().enumerate() {
            let j = j0 + k as u64;
            acc += c * x.powi((j - 1) as i32) * u.powi((nm - j - 1) as i32);
        }
        acc
    }

    /// Exact-rational term summation at the dyadic value of `x`.
    fn eval_exact_fallback(&self, x: f64) -> f64 {
        let params = self.params();
        let nm = params.nm();
        let j0 = self.base.j_min();
        let xr = f64_to_rational(x);
        let ur = BigRational::one() - BigRational::from_integer(BigInt::from(params.n)) * &xr;
        let (h_num, h_den) = self.base.h_shared();
        // rising = Γ(nm)/Γ(nm−j) for the current j, updated incrementally
        let mut rising: BigInt = (nm - j0..nm).map(BigInt::from).product();
        let mut x_pow = pow_rational(&xr, j0 - 1);
        let mut u_pow = pow_rational(&ur, nm - j0 - 1);
        let mut total = BigRational::zero();
        for (k, hk) in h_num.iter().enumerate() {
            let j = j0 + k as u64;
            total += BigRational::from_integer(hk * &rising) * &x_pow * &u_pow;
            if k + 1 < h_num.len() {
                rising *= BigInt::from(nm - j - 1);
                x_pow *= &xr;
                u_pow /= &ur;
            }
        }
        total /= BigRational::from_integer(h_den.clone());
        if total.is_zero() {
            return 0.0;
        }
        let sign = if total.is_negative() { -1.0 } else { 1.0 };
        let ln_val = ln_abs_ratio(total.numer(), total.denom())
            .expect("nonzero")
            .value();
        if ln_val < EXP_UNDERFLOW {
            return 0.0;
        }
        sign * ln_val.exp()
    }

    /// Distribution function
    /// `F_F(x) = Σ_j w_j I_{nx}(j, nm−j)` with `w_j = h_j Γ(j)/n^j` and
    /// `I` the regularized incomplete beta function.
    pub fn ft_cdf(&self, x: f64) -> f64 {
        let n = f64::from(self.params().n);
        if !(x > 0.0) {
            return 0.0;
        }
        if n * x >= 1.0 {
            return 1.0;
        }
        let nx = n * x;
        let nm = self.params().nm();
        let ln_n = n.ln();
        let j0 = self.base.j_min();
        let (signs, ln_abs) = self.base.ln_terms();
        let mut sum = CompensatedSum::new();
        for (k, (lh, s)) in ln_abs.iter().zip(signs).enumerate() {
            if *s == 0 {
                continue;
            }
            let j = (j0 + k as u64) as f64;
            let ln_w = lh + lgamma(j) - j * ln_n;
            if ln_w < EXP_UNDERFLOW {
                continue;
            }
            sum.add(f64::from(*s) * ln_w.exp() * beta_reg(j, nm as f64 - j, nx));
        }
        sum.value().clamp(0.0, 1.0)
    }

    /// Exact moment of the fixed-trace smallest eigenvalue (see
    /// [`ft_moment`]).
    pub fn moment(&self, order: MomentOrder) -> Result<MomentValue> {
        ft_moment_impl(&self.base, order)
    }

    /// The density expanded to one dense polynomial of degree `nm − 2`
    /// (for exact comparisons against factored printed forms).
    pub fn expanded_polynomial(&self) -> RationalPolynomial {
        let params = self.params();
        let nm = params.nm();
        let j0 = self.base.j_min();
        let (h_num, h_den) = self.base.h_shared();
        let edge = RationalPolynomial::from_coeffs(vec![
            BigRational::one(),
            BigRational::from_integer(-BigInt::from(params.n)),
        ]); // 1 − n x
        let mut total = RationalPolynomial::zero();
        let mut rising: BigInt = (nm - j0..nm).map(BigInt::from).product();
        for (k, hk) in h_num.iter().enumerate() {
            let j = j0 + k as u64;
            let coef = BigRational::new(hk * &rising, h_den.clone());
            let term = pow_polynomial(&edge, nm - j - 1)
                .scale(&coef)
                .shift_up((j - 1) as usize);
            total = total.add(&term);
            if k + 1 < h_num.len() {
                rising *= BigInt::from(nm - j - 1);
            }
        }
        total
    }

    /// JSON form: same exact-coefficient layout as the regular ensemble,
    /// tagged `"fixed-trace"`, with the per-term exponent pair.
    pub fn to_json(&self) -> serde_json::Value {
        let params = self.params();
        json!({
            "n": params.n,
            "m": params.m,
            "kind": "fixed-trace",
            "coeffs": self.base.h_terms().iter().map(|(j, h)| {
                let (px, pe) = self.exponent_pair(*j);
                json!({
                    "j": j,
                    "num": h.numer().to_string(),
                    "den": h.denom().to_string(),
                    "pow_x": px,
                    "pow_edge": pe,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

fn pow_rational(base: &BigRational, exp: u64) -> BigRational {
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

fn pow_polynomial(base: &RationalPolynomial, exp: u64) -> RationalPolynomial {
    let mut acc = RationalPolynomial::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul(&sq);
        }
    }
    acc
}

/// Moment `⟨x^η⟩_F = (Γ(nm)/Γ(nm+η)) ⟨x^η⟩` of the fixed-trace smallest
/// eigenvalue, exact for integer orders. Valid for all `n ≥ 1` (at `n = 1`
/// the ratio collapses to exactly 1, consistent with the point mass at 1).
pub fn ft_moment(params: EnsembleParams, order: MomentOrder) -> Result<MomentValue> {
    let base = smin_closed_form(params)?;
    ft_moment_impl(&base, order)
}

fn ft_moment_impl(base: &SminClosedForm, order: MomentOrder) -> Result<MomentValue> {
    let nm = base.params().nm();
    match base.moment(order)? {
        MomentValue::Exact(r) => {
            let eta = order.as_integer().expect("exact implies integer");
            let ratio = if eta >= 0 {
                gamma_ratio(nm, nm + eta as u64)
            } else {
                gamma_ratio(nm, nm - eta.unsigned_abs())
            };
            Ok(MomentValue::Exact(Rational(r.0 * ratio)))
        }
        MomentValue::Approx(v) => {
            let ln_ratio = ln_gamma(nm as f64) - ln_gamma(nm as f64 + order.eta);
            Ok(MomentValue::Approx(v * ln_ratio.exp()))
        }
    }
}

/// Tail mass near the maximal-eigenvalue edge,
/// `R(δ) = ∫_{1/n−δ}^{1/n} f_F(x) dx`, in exact rational arithmetic.
///
/// Each term integrates in closed form: substituting `u = 1 − nx`,
///
/// ```text
/// ∫ x^{j−1}(1−nx)^{nm−j−1} dx
///   = n^{−j} Σ_{k=0}^{j−1} C(j−1,k)(−1)^k (nδ)^{nm−j+k} / (nm−j+k).
/// ```
///
/// Values span below 1e−90, which `1 − cdf` in doubles cannot represent;
/// the exact route has no such floor.
pub fn r_delta_exact(params: EnsembleParams, delta: &BigRational) -> Result<Rational> {
    let n_big = BigRational::from_integer(BigInt::from(params.n));
    let upper = BigRational::new(BigInt::one(), BigInt::from(params.n));
    if !(delta > &BigRational::zero() && delta <= &upper) {
        return Err(Error::InvalidParams(format!(
            "δ must lie in (0, 1/n] (got {delta})"
        )));
    }
    if params.n == 1 {
        // Point mass at the upper edge: the whole mass is within any δ.
        return Ok(Rational::one());
    }
    let base = smin_closed_form(params)?;
    let nm = base.params().nm();
    let j0 = base.j_min();
    let (h_num, h_den) = base.h_shared();
    let u = &n_big * delta; // nδ ∈ (0, 1]
    // u^e for e = 1..nm−1 (largest needed exponent is nm−j+k ≤ nm−1).
    let mut u_pows = Vec::with_capacity(nm as usize);
    u_pows.push(BigRational::one());
    for _ in 1..nm {
        let last = u_pows.last().expect("nonempty") * &u;
        u_pows.push(last);
    }
    let n_int = BigInt::from(params.n);
    let mut rising: BigInt = (nm - j0..nm).map(BigInt::from).product(); // Γ(nm)/Γ(nm−j)
    let mut n_pow = bigint_pow(&n_int, j0); // n^j
    let mut total = BigRational::zero();
    for (idx, hk) in h_num.iter().enumerate() {
        let j = j0 + idx as u64;
        // inner binomial sum over k
        let mut binom = BigInt::one(); // C(j−1, k)
        let mut inner = BigRational::zero();
        for k in 0..j {
            let e = nm - j + k; // ≥ nm − j_max ≥ 1
            let term = BigRational::new(binom.clone(), BigInt::from(e)) * &u_pows[e as usize];
            if k % 2 == 0 {
                inner += term;
            } else {
                inner -= term;
            }
            // C(j−1, k+1) = C(j−1, k) (j−1−k)/(k+1)
            binom = binom * BigInt::from(j - 1 - k) / BigInt::from(k + 1);
        }
        total += BigRational::new(hk * &rising, &n_pow * h_den) * inner;
        if idx + 1 < h_num.len() {
            rising *= BigInt::from(nm - j - 1);
            n_pow *= &n_int;
        }
    }
    Ok(Rational(total))
}

/// [`r_delta_exact`] for a floating `δ` (taken at its exact dyadic value),
/// returned as `f64`. The conversion is bit-scaled, so magnitudes down to
/// 1e−300 survive.
pub fn r_delta(params: EnsembleParams, delta: f64) -> Result<f64> {
    if !delta.is_finite() {
        return Err(Error::InvalidParams(format!("δ must be finite, got {delta}")));
    }
    let exact = r_delta_exact(params, &f64_to_rational(delta))?;
    Ok(big_ratio_to_f64(exact.numer(), exact.denom()))
}

/// Large-`m` approximation to the fixed-trace density obtained by pure
/// rescaling of the regular one: `f̃(x) = mn · f(mn·x)`.
pub fn scaled_approx_density(form: &SminClosedForm, x: f64) -> Result<f64> {
    let mn = form.params().nm() as f64;
    Ok(mn * form.eval_density(mn * x)?)
}

/// Cross-check of the `α = 1` fixed-trace density against an independently
/// derived coefficient formula: with `nm = n(n+1)`,
///
/// ```text
/// f_F(x) = Σ_{j=2}^{n+1} [Γ(nm)Γ(n+2) / (Γ(n−j+2)Γ(j+1)Γ(j−1)Γ(nm−j))]
///          x^{j−1} (1−nx)^{nm−j−1},
/// ```
///
/// compared term by term (exact rationals) with the recurrence route.
pub fn clz_alpha1_check(n: u32) -> bool {
    if n == 1 {
        return true; // both routes degenerate to the point mass at 1
    }
    let params = match EnsembleParams::new(n, n + 1) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let form = match FtClosedForm::new(params) {
        Ok(f) => f,
        Err(_) => return false,
    };
    let nm = params.nm();
    let n64 = u64::from(n);
    let (h_num, h_den) = form.base.h_shared();
    if form.base.j_min() != 2 || form.base.j_max() != n64 + 1 {
        return false;
    }
    let mut rising: BigInt = (nm - 2..nm).map(BigInt::from).product();
    for (k, hk) in h_num.iter().enumerate() {
        let j = 2 + k as u64;
        // recurrence-route term coefficient: Γ(nm) h_j / Γ(nm−j)
        let lhs = BigRational::new(hk * &rising, h_den.clone());
        let rhs = BigRational::new(
            gamma_int(nm) * gamma_int(n64 + 2),
            gamma_int(n64 + 2 - j) * gamma_int(j + 1) * gamma_int(j - 1) * gamma_int(nm - j),
        );
        if lhs != rhs {
            return false;
        }
        if k + 1 < h_num.len() {
            rising *= BigInt::from(nm - j - 1);
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, m: u32) -> EnsembleParams {
        EnsembleParams::new(n, m).unwrap()
    }

    fn density(n: u32, m: u32) -> FtClosedForm {
        match ft_closed_form(params(n, m)).unwrap() {
            FtForm::Density(f) => f,
            FtForm::Degenerate { .. } => panic!("expected density"),
        }
    }

    #[test]
    fn degenerate_marker_for_single_eigenvalue() {
        let f = ft_closed_form(params(1, 7)).unwrap();
        assert!(f.as_density().is_none());
        assert_eq!(f.ft_cdf(0.999), 0.0);
        assert_eq!(f.ft_cdf(1.0), 1.0);
        assert_eq!(f.eval_ft_density(0.5), 0.0);
    }

    #[test]
    fn density_2_3_matches_printed_form() {
        // 60 x (1−x)(1−2x)² on [0, 1/2]
        let f = density(2, 3);
        for x in [0.05f64, 0.1, 0.25, 0.4, 0.49] {
            let expect = 60.0 * x * (1.0 - x) * (1.0 - 2.0 * x).powi(2);
            let got = f.eval_ft_density(x);
            assert!(
                (got - expect).abs() < 1e-12 * expect.max(1.0),
                "x={x}: {got} vs {expect}"
            );
        }
        assert_eq!(f.eval_ft_density(0.25), 45.0 / 16.0);
        assert_eq!(f.eval_ft_density(-0.1), 0.0);
        assert_eq!(f.eval_ft_density(0.5), 0.0);
        assert_eq!(f.eval_ft_density(0.6), 0.0);
        assert_eq!(f.eval_ft_density(0.0), 0.0);
    }

    #[test]
    fn square_case_closed_form() {
        // α = 0: f_F(x) = n(n²−1)(1−nx)^{n²−2}
        for n in [2u32, 3, 5] {
            let f = density(n, n);
            let nf = f64::from(n);
            for &x in &[0.0, 0.07, 0.31 / nf, 0.9 / nf] {
                let expect = nf * (nf * nf - 1.0) * (1.0 - nf * x).powi((n * n - 2) as i32);
                let got = f.eval_ft_density(x);
                assert!(
                    (got - expect).abs() < 1e-11 * expect.max(1.0),
                    "n={n} x={x}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn expanded_polynomial_2_3() {
        // 60x(1−x)(1−2x)² = 60x − 300x² + 480x³ − 240x⁴
        let f = density(2, 3);
        assert_eq!(
            f.expanded_polynomial(),
            RationalPolynomial::from_integers(&[0, 60, -300, 480, -240])
        );
    }

    #[test]
    fn cdf_values_and_edges() {
        let f = density(2, 3);
        assert_eq!(f.ft_cdf(-0.2), 0.0);
        assert_eq!(f.ft_cdf(0.0), 0.0);
        assert_eq!(f.ft_cdf(0.5), 1.0);
        assert_eq!(f.ft_cdf(0.7), 1.0);
        // frozen reference values
        assert!((f.ft_cdf(0.3) - 0.85536).abs() < 1e-12);
        let f34 = density(3, 4);
        assert!((f34.ft_cdf(0.2) - 0.9966707712).abs() < 1e-11);
    }

    #[test]
    fn cdf_complements_tail_mass() {
        // 1 − F_F(1/n − δ) must agree with the exact tail integral where
        // doubles can still see it.
        let p = params(2, 3);
        let f = density(2, 3);
        let delta = 0.05;
        let tail = r_delta(p, delta).unwrap();
        let viacdf = 1.0 - f.ft_cdf(0.5 - delta);
        assert!((tail - viacdf).abs() < 1e-12, "{tail} vs {viacdf}");
    }

    #[test]
    fn exact_tail_mass_values() {
        // δ = 1/20 at (2,3): exactly 497/200000
        let r = r_delta_exact(params(2, 3), &BigRational::new(1.into(), 20.into())).unwrap();
        assert_eq!(r.to_string(), "497/200000");
        // order-of-magnitude frozen values at δ = 0.1/n
        let cases: [(u32, u32, f64); 3] = [
            (3, 11, 7.929871e-6),
            (7, 19, 9.703391e-35),
            (11, 25, 5.098306e-91),
        ];
        for (n, m, expect) in cases {
            let delta = BigRational::new(1.into(), (10 * n).into());
            let r = r_delta_exact(params(n, m), &delta).unwrap();
            let v = big_ratio_to_f64(r.numer(), r.denom());
            assert!(
                (v / expect - 1.0).abs() < 1e-5,
                "(n,m)=({n},{m}): {v:e} vs {expect:e}"
            );
        }
        // n = 1 point mass: all mass within any δ
        let r = r_delta_exact(params(1, 3), &BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(r, Rational::one());
        // domain errors
        assert!(r_delta_exact(params(2, 3), &BigRational::zero()).is_err());
        assert!(r_delta_exact(params(2, 3), &BigRational::new(3.into(), 4.into())).is_err());
    }

    #[test]
    fn moments_exact_and_ratio() {
        // (2,3): mean 3/16 = (9/8)/6
        let v = ft_moment(params(2, 3), MomentOrder::new(1.0).unwrap()).unwrap();
        assert_eq!(v.as_exact().unwrap().to_string(), "3/16");
        // α=0: mean = 1/n³
        let v = ft_moment(params(3, 3), MomentOrder::new(1.0).unwrap()).unwrap();
        assert_eq!(v.as_exact().unwrap().to_string(), "1/27");
        // frozen larger case
        let v = ft_moment(params(3, 11), MomentOrder::new(1.0).unwrap()).unwrap();
        assert_eq!(
            v.as_exact().unwrap().to_string(),
            "400963529827/2541865828329"
        );
        let v = ft_moment(params(3, 5), MomentOrder::new(2.0).unwrap()).unwrap();
        assert_eq!(v.as_exact().unwrap().to_string(), "373/39366");
        // η=0 normalization
        let v = ft_moment(params(4, 7), MomentOrder::new(0.0).unwrap()).unwrap();
        assert_eq!(v.as_exact().unwrap().to_string(), "1");
        // fractional: frozen reference
        let v = ft_moment(params(3, 5), MomentOrder::new(0.5).unwrap()).unwrap();
        assert!((v.to_f64() - 0.2876656143425184969994).abs() < 1e-13);
        // n = 1: every moment is exactly 1
        let v = ft_moment(params(1, 9), MomentOrder::new(2.0).unwrap()).unwrap();
        assert_eq!(v.as_exact().unwrap().to_string(), "1");
    }

    #[test]
    fn alpha1_coefficient_cross_check() {
        for n in [1u32, 2, 3, 7, 10] {
            assert!(clz_alpha1_check(n), "α=1 cross-check failed at n={n}");
        }
    }

    #[test]
    fn scaled_approximation_square_case() {
        // α=0: f̃(x) = mn·n·e^{−n·mn·x}
        let form = smin_closed_form(params(3, 3)).unwrap();
        let mn = 9.0f64;
        for x in [0.0f64, 0.01, 0.05] {
            let expect = mn * 3.0 * (-3.0 * mn * x).exp();
            let got = scaled_approx_density(&form, x).unwrap();
            assert!((got - expect).abs() < 1e-11 * expect.max(1.0));
        }
    }

    #[test]
    fn json_includes_exponent_pairs() {
        let f = density(2, 3);
        let v = f.to_json();
        assert_eq!(v["kind"], "fixed-trace");
        assert_eq!(v["coeffs"][0]["j"], 2);
        assert_eq!(v["coeffs"][0]["pow_x"], 1);
        assert_eq!(v["coeffs"][0]["pow_edge"], 3);
    }
}

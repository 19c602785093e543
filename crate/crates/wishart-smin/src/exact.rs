//! Exact closed form for the smallest-eigenvalue density of the complex
//! Wishart–Laguerre ensemble `W = A A†` (`A` an `n × m` complex Gaussian
//! matrix, `m ≥ n`, rectangularity `α = m − n`).
//!
//! The density is
//!
//! ```text
//! f(x) = c_{n,m} e^{-n x} x^α g_{n,m}(x)
//!      = Σ_{j=α+1}^{αn+1} h_j x^{j-1} e^{-n x},
//! ```
//!
//! where `g_{n,m}` is a degree-`α(n−1)` polynomial built by an exact
//! recurrence ascending one unit of `α` per pass from the square base
//! `g_{n,n} = 1`, and the `h_j` are exact rationals. All coefficient work
//! is arbitrary-precision rational arithmetic; floating point enters only
//! at evaluation time, and the unit-normalization identity
//! `Σ_j h_j Γ(j)/n^j = 1` is asserted exactly on every constructed form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::json;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::laguerre;
use crate::numeric::{
    big_ratio_to_f64, f64_to_rational, ln_abs_bigint, ln_abs_ratio, CompensatedSum,
};
use crate::params::{EnsembleParams, MomentOrder};
use crate::rational::{Rational, RationalPolynomial};
use crate::{Error, Result};

/// Largest `n·m` for which density evaluation uses direct double-precision
/// Horner on the polynomial part. Above this, terms are assembled in the
/// log domain (`exp(ln|h_j| + (j−1)ln x − nx)`) because coefficient
/// magnitudes span too many orders for direct summation.
pub(crate) const DIRECT_EVAL_MAX_NM: u64 = 400;

/// Exponent at which `exp` underflows to zero in `f64`.
const EXP_UNDERFLOW: f64 = -745.0;

/// Cancellation threshold `Σ|tᵢ|/|Σtᵢ|` beyond which the floating
/// evaluation is distrusted and the exact-rational fallback is used.
const CANCELLATION_LIMIT: f64 = 1e6;

// ---------------------------------------------------------------------------
// Integer helpers shared across the crate.
// ---------------------------------------------------------------------------

/// `k!` as an exact integer.
pub(crate) fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    acc
}

/// `Γ(k) = (k−1)!` for integer `k ≥ 1`.
pub(crate) fn gamma_int(k: u64) -> BigInt {
    assert!(k >= 1, "Γ at non-positive integer");
    factorial(k - 1)
}

/// `Γ(a)/Γ(b)` for positive integers, via the partial product rather than
/// two full factorials.
pub(crate) fn gamma_ratio(a: u64, b: u64) -> BigRational {
    assert!(a >= 1 && b >= 1);
    if a >= b {
        BigRational::from_integer((b..a).map(BigInt::from).product())
    } else {
        BigRational::new(BigInt::one(), (a..b).map(BigInt::from).product())
    }
}

/// `base^exp` for a `BigInt` base and `u64` exponent.
pub(crate) fn bigint_pow(base: &BigInt, exp: u64) -> BigInt {
    let mut acc = BigInt::one();
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

// ---------------------------------------------------------------------------
// The g_{n,m} recurrence over integer coefficients with a shared denominator.
// ---------------------------------------------------------------------------

/// Polynomial with `BigInt` coefficients over one shared positive
/// denominator — the working representation inside the recurrence, where
/// every division that appears is by a small integer and can be absorbed
/// into the denominator instead of reducing each coefficient separately.
#[derive(Clone, Debug)]
struct ScaledIntPoly {
    /// Coefficient of `x^k` at index `k`.
    num: Vec<BigInt>,
    /// Shared positive denominator.
    den: BigInt,
}

impl ScaledIntPoly {
    fn one() -> Self {
        Self {
            num: vec![BigInt::one()],
            den: BigInt::one(),
        }
    }

    /// Divide out the gcd of all numerators and the denominator. After a
    /// full pass the polynomial is integral, so this restores `den = 1`.
    fn reduce_content(&mut self) {
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }
}

/// One pass of the recurrence: from `g_{n,m′−1}` to `g_{n,m′}`.
///
/// With `S_0 = g_{n,m′−1}`, `S_{−1} = 0`, iterate for `i = 1 … n−1`
///
/// ```text
/// S_i = (x + m′ − i + 1) S_{i−1} − (x/(n−i)) S′_{i−1}
///       + x (i−1) (m′−i)/(n−i) S_{i−2},
/// ```
///
/// and return `g_{n,m′} = S_{n−1}`. Over the shared-denominator
/// representation, multiplying through by `(n−i)` gives the integer update
/// used below: with `S_{i−1} = P/d` and `S_{i−2} = Q/d`,
///
/// ```text
/// S_i = [ (n−i)(x+q) P − x P′ + x (i−1)(m′−i) Q ] / (d (n−i)),   q = m′−i+1,
/// ```
///
/// where the `x P′` contribution at degree `k` is just `k·P[k]`.
fn advance_pass(n: u32, m_prime: u32, prev: &ScaledIntPoly) -> ScaledIntPoly {
    let n_i = i128::from(n);
    let mp = i128::from(m_prime);
    let mut p2: Vec<BigInt> = Vec::new(); // S_{i−2} numerators at the current den
    let mut p1 = prev.num.clone(); // S_{i−1} numerators at the current den
    let mut den = prev.den.clone();
    for i in 1..n_i {
        let gap = n_i - i; // n − i ≥ 1
        let q = mp - i + 1;
        let c2 = (i - 1) * (mp - i);
        let mut out = Vec::with_capacity(p1.len() + 1);
        for k in 0..p1.len() + 1 {
            let mut v = BigInt::zero();
            if k >= 1 {
                if let Some(a) = p1.get(k - 1) {
                    v += a * BigInt::from(gap);
                }
                if c2 != 0 {
                    if let Some(b) = p2.get(k - 1) {
                        v += b * BigInt::from(c2);
                    }
                }
            }
            if let Some(a) = p1.get(k) {
                v += a * BigInt::from(gap * q - k as i128);
            }
            out.push(v);
        }
        p2 = p1.iter().map(|a| a * BigInt::from(gap)).collect();
        p1 = out;
        den *= BigInt::from(gap);
    }
    let mut result = ScaledIntPoly { num: p1, den };
    result.reduce_content();
    result
}

/// Cache of computed `g_{n,m}`: per `n`, a sorted map `m → polynomial`.
/// Long ascents checkpoint every [`STONE_STRIDE`] passes so later queries
/// resume from the nearest smaller entry; between requests only the
/// checkpoints and the most recent request are retained to bound memory.
static G_CACHE: OnceLock<Mutex<HashMap<u32, BTreeMap<u32, Arc<ScaledIntPoly>>>>> = OnceLock::new();

const STONE_STRIDE: u32 = 50;

fn g_scaled(n: u32, m: u32) -> Arc<ScaledIntPoly> {
    let cache = G_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let start = {
        let guard = cache.lock().expect("g cache poisoned");
        guard.get(&n).and_then(|per_n| {
            per_n
                .range(..=m)
                .next_back()
                .map(|(k, v)| (*k, Arc::clone(v)))
        })
    };
    let (mut m_cur, mut poly) = start.unwrap_or_else(|| (n, Arc::new(ScaledIntPoly::one())));
    if m_cur == m {
        return poly;
    }
    let mut checkpoints: Vec<(u32, Arc<ScaledIntPoly>)> = Vec::new();
    while m_cur < m {
        m_cur += 1;
        poly = Arc::new(advance_pass(n, m_cur, &poly));
        if (m_cur - n) % STONE_STRIDE == 0 {
            checkpoints.push((m_cur, Arc::clone(&poly)));
        }
    }
    let mut guard = cache.lock().expect("g cache poisoned");
    let per_n = guard.entry(n).or_default();
    for (k, v) in checkpoints {
        per_n.insert(k, v);
    }
    per_n.insert(m, Arc::clone(&poly));
    per_n.retain(|k, _| *k == m || (*k - n) % STONE_STRIDE == 0);
    poly
}

// ---------------------------------------------------------------------------
// Public exact operations.
// ---------------------------------------------------------------------------

/// Normalization constant
/// `c_{n,m} = (1/(Γ(n)Γ(m))) ∏_{i=1}^{n−1} Γ(i+2)/Γ(i+α)`,
/// computed with exact integer factorials.
pub fn norm_constant(params: EnsembleParams) -> Rational {
    let alpha = u64::from(params.alpha());
    let mut num = BigInt::one();
    let mut den = gamma_int(u64::from(params.n)) * gamma_int(u64::from(params.m));
    for i in 1..u64::from(params.n) {
        num *= gamma_int(i + 2);
        den *= gamma_int(i + alpha);
    }
    Rational(BigRational::new(num, den))
}

/// The polynomial factor `g_{n,m}(x)` of the smallest-eigenvalue density,
/// of degree `α(n−1)`, computed by the exact ascending recurrence from the
/// square base `g_{n,n} = 1`.
pub fn recurrence_g(params: EnsembleParams) -> RationalPolynomial {
    let g = g_scaled(params.n, params.m);
    RationalPolynomial::from_coeffs(
        g.num
            .iter()
            .map(|c| BigRational::new(c.clone(), g.den.clone()))
            .collect(),
    )
}

/// Exact series form of the smallest-eigenvalue density,
/// `f(x) = Σ_{j=α+1}^{αn+1} h_j x^{j−1} e^{−n x}` with rational `h_j`.
///
/// Construction multiplies the `g_{n,m}` coefficients by `c_{n,m}`, shifts
/// the degree by `α`, and then asserts the exact normalization identity
/// `Σ_j h_j Γ(j)/n^j = 1` in pure integer arithmetic — a total correctness
/// check on the whole recurrence.
#[derive(Clone, Debug)]
pub struct SminClosedForm {
    params: EnsembleParams,
    /// Numerator of `h_{j_min + k}` at index `k`, over the shared
    /// denominator `h_den`.
    h_num: Vec<BigInt>,
    h_den: BigInt,
    /// Per-term sign of `h_j` (0 for a vanishing coefficient).
    signs: Vec<i8>,
    /// Per-term `ln|h_j|` (−∞ for a vanishing coefficient), assembled in
    /// double-double from the big-integer bit lengths, then rounded.
    ln_abs: Vec<f64>,
    /// `h_j` rounded to `f64`, for the direct small-parameter path.
    coeff_f64: Vec<f64>,
}

/// Build the [`SminClosedForm`] for the given dimensions.
pub fn smin_closed_form(params: EnsembleParams) -> Result<SminClosedForm> {
    SminClosedForm::new(params)
}

impl SminClosedForm {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        let g = g_scaled(params.n, params.m);
        let alpha = u64::from(params.alpha());
        let n = u64::from(params.n);
        let expected_len = (alpha * (n - 1) + 1) as usize;
        if g.num.len() != expected_len || g.num.last().map_or(true, Zero::is_zero) {
            return Err(Error::IdentityCheck(format!(
                "polynomial factor for n={}, m={} has degree {} (expected α(n−1) = {})",
                params.n,
                params.m,
                g.num.len().saturating_sub(1),
                expected_len - 1
            )));
        }
        let c = norm_constant(params);
        let mut h_num: Vec<BigInt> = g.num.iter().map(|a| a * c.numer()).collect();
        let mut h_den = &g.den * c.denom();
        // Reduce by the shared content so the stored form is canonical.
        let mut content = h_den.clone();
        for a in &h_num {
            if content.is_one() {
                break;
            }
            if !a.is_zero() {
                content = content.gcd(a);
            }
        }
        if !content.is_one() {
            for a in &mut h_num {
                *a /= &content;
            }
            h_den /= &content;
        }

        let form = Self {
            signs: h_num
                .iter()
                .map(|a| match a.sign() {
                    num_bigint::Sign::Plus => 1,
                    num_bigint::Sign::NoSign => 0,
                    num_bigint::Sign::Minus => -1,
                })
                .collect(),
            ln_abs: h_num
                .iter()
                .map(|a| {
                    ln_abs_ratio(a, &h_den).map_or(f64::NEG_INFINITY, |dd| dd.value())
                })
                .collect(),
            coeff_f64: h_num.iter().map(|a| big_ratio_to_f64(a, &h_den)).collect(),
            params,
            h_num,
            h_den,
        };
        form.check_normalization()?;
        Ok(form)
    }

    /// Exact integer form of `Σ_j h_j Γ(j)/n^j = 1`:
    /// `Σ_k h_num[k] Γ(j) n^{J−j} == h_den · n^J` with `J = αn+1`.
    fn check_normalization(&self) -> Result<()> {
        let n = BigInt::from(self.params.n);
        let j0 = self.j_min();
        let j_max = self.j_max();
        let mut fact = gamma_int(j0);
        let mut pow = bigint_pow(&n, j_max - j0);
        let mut lhs = BigInt::zero();
        for (k, hk) in self.h_num.iter().enumerate() {
            let j = j0 + k as u64;
            lhs += hk * &fact * &pow;
            fact *= BigInt::from(j);
            if j < j_max {
                pow /= &n;
            }
        }
        let rhs = &self.h_den * bigint_pow(&n, j_max);
        if lhs == rhs {
            Ok(())
        } else {
            Err(Error::IdentityCheck(format!(
                "unit normalization of the n={}, m={} series failed",
                self.params.n, self.params.m
            )))
        }
    }

    pub fn params(&self) -> EnsembleParams {
        self.params
    }

    /// Smallest series index, `j = α+1`.
    pub fn j_min(&self) -> u64 {
        u64::from(self.params.alpha()) + 1
    }

    /// Largest series index, `j = αn+1`.
    pub fn j_max(&self) -> u64 {
        u64::from(self.params.alpha()) * u64::from(self.params.n) + 1
    }

    /// Coefficient `h_j` in lowest terms; `None` outside `[α+1, αn+1]`.
    pub fn h(&self, j: u64) -> Option<Rational> {
        if j < self.j_min() || j > self.j_max() {
            return None;
        }
        let k = (j - self.j_min()) as usize;
        Some(Rational(BigRational::new(
            self.h_num[k].clone(),
            self.h_den.clone(),
        )))
    }

    /// All `(j, h_j)` pairs in ascending `j`.
    pub fn h_terms(&self) -> Vec<(u64, Rational)> {
        (self.j_min()..=self.j_max())
            .map(|j| (j, self.h(j).expect("in range")))
            .collect()
    }

    /// Shared-denominator view of the coefficients (index 0 ↔ `j = α+1`).
    pub(crate) fn h_shared(&self) -> (&[BigInt], &BigInt) {
        (&self.h_num, &self.h_den)
    }

    pub(crate) fn ln_terms(&self) -> (&[i8], &[f64]) {
        (&self.signs, &self.ln_abs)
    }

    /// The full polynomial part `Σ_j h_j x^{j−1}` (density = this × e^{−nx}).
    pub fn density_polynomial(&self) -> RationalPolynomial {
        let mut coeffs = vec![BigRational::zero(); (self.j_min() - 1) as usize];
        coeffs.extend(
            self.h_num
                .iter()
                .map(|a| BigRational::new(a.clone(), self.h_den.clone())),
        );
        RationalPolynomial::from_coeffs(coeffs)
    }

    /// Density `f(x)` at `x ≥ 0`.
    ///
    /// Small parameters (`nm ≤ 400`) evaluate the polynomial part by Horner
    /// in double precision. Larger parameters assemble each series term in
    /// the log domain with compensated summation; if catastrophic
    /// cancellation is detected the exact-rational fallback is used.
    pub fn eval_density(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "density argument must be ≥ 0 (got {x})"
            )));
        }
        if x == 0.0 {
            // x^{j−1} at x=0: only a j=1 term (α=0) survives.
            return Ok(if self.params.alpha() == 0 {
                self.coeff_f64[0]
            } else {
                0.0
            });
        }
        if self.params.nm() <= DIRECT_EVAL_MAX_NM {
            let v = self.eval_direct(x);
            if v.is_finite() {
                return Ok(v.max(0.0));
            }
        }
        self.eval_log_domain(x)
    }

    fn eval_direct(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeff_f64.iter().rev() {
            acc = acc * x + c;
        }
        let n = f64::from(self.params.n);
        acc * x.powi(self.params.alpha() as i32) * (-n * x).exp()
    }

    fn eval_log_domain(&self, x: f64) -> Result<f64> {
        let ln_x = x.ln();
        let base = -f64::from(self.params.n) * x;
        let j0 = self.j_min() as f64;
        let mut ln_max = f64::NEG_INFINITY;
        let exponents: Vec<f64> = self
            .ln_abs
            .iter()
            .enumerate()
            .map(|(k, lh)| {
                let e = lh + (j0 - 1.0 + k as f64) * ln_x + base;
                if e > ln_max {
                    ln_max = e;
                }
                e
            })
            .collect();
        if ln_max == f64::NEG_INFINITY || ln_max < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        let mut sum = CompensatedSum::new();
        for (e, s) in exponents.iter().zip(&self.signs) {
            if *s != 0 {
                sum.add(f64::from(*s) * (e - ln_max).exp());
            }
        }
        let v = sum.value();
        if sum.cancellation() > CANCELLATION_LIMIT || v < 0.0 {
            return self.eval_exact_fallback(x);
        }
        Ok(ln_max.exp() * v)
    }

    /// Exact-rational polynomial evaluation at the dyadic value of `x`,
    /// with only the final `e^{−nx}` composition in floating point.
    fn eval_exact_fallback(&self, x: f64) -> Result<f64> {
        let xr = f64_to_rational(x);
        let mut acc = BigRational::zero();
        for c in self.h_num.iter().rev() {
            acc = &acc * &xr + BigRational::from_integer(c.clone());
        }
        if acc.is_zero() {
            return Ok(0.0);
        }
        let sign = if acc.is_negative() { -1.0 } else { 1.0 };
        let ln_val = ln_abs_ratio(acc.numer(), acc.denom())
            .expect("nonzero")
            .sub(ln_abs_bigint(&self.h_den).expect("nonzero"))
            .add_f64((self.j_min() as f64 - 1.0) * x.ln())
            .add_f64(-f64::from(self.params.n) * x)
            .value();
        if ln_val < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        Ok(sign * ln_val.exp())
    }

    /// Distribution function `F(x) = Σ_j h_j γ(j, nx)/n^j` via the
    /// regularized lower incomplete gamma (`γ(j, y)/Γ(j)`): each term is
    /// the weight `w_j = h_j Γ(j)/n^j` (the weights sum to 1 exactly)
    /// times `P(j, nx)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "distribution argument must be ≥ 0 (got {x})"
            )));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let n = f64::from(self.params.n);
        let ln_n = n.ln();
        let nx = n * x;
        let j0 = self.j_min();
        let mut sum = CompensatedSum::new();
        for (k, (lh, s)) in self.ln_abs.iter().zip(&self.signs).enumerate() {
            if *s == 0 {
                continue;
            }
            let j = (j0 + k as u64) as f64;
            let ln_w = lh + ln_gamma(j) - j * ln_n;
            if ln_w < EXP_UNDERFLOW {
                continue;
            }
            sum.add(f64::from(*s) * ln_w.exp() * gamma_lr(j, nx));
        }
        Ok(sum.value().clamp(0.0, 1.0))
    }

    /// Moment `⟨x^η⟩ = Σ_j h_j Γ(j+η)/n^{j+η}`, defined for `η > −α−1`.
    /// Integer orders are computed exactly; other orders via log-gamma.
    pub fn moment(&self, order: MomentOrder) -> Result<MomentValue> {
        order.validate_for_alpha(self.params.alpha())?;
        match order.as_integer() {
            Some(eta) => Ok(MomentValue::Exact(self.moment_exact(eta))),
            None => Ok(MomentValue::Approx(self.moment_float(order.eta))),
        }
    }

    fn moment_exact(&self, eta: i64) -> Rational {
        let j0 = self.j_min() as i64;
        let j_max = self.j_max() as i64;
        let n = BigInt::from(self.params.n);
        // Σ_k h_num[k] Γ(j+η) n^{J−j}  over  h_den n^{J+η}.
        let mut fact = gamma_int((j0 + eta) as u64);
        let mut pow = bigint_pow(&n, (j_max - j0) as u64);
        let mut total = BigInt::zero();
        for (k, hk) in self.h_num.iter().enumerate() {
            let j = j0 + k as i64;
            total += hk * &fact * &pow;
            fact *= BigInt::from(j + eta);
            if j < j_max {
                pow /= &n;
            }
        }
        let den = &self.h_den * bigint_pow(&n, (j_max + eta) as u64);
        Rational(BigRational::new(total, den))
    }

    fn moment_float(&self, eta: f64) -> f64 {
        let ln_n = f64::from(self.params.n).ln();
        let j0 = self.j_min() as f64;
        let mut sum = CompensatedSum::new();
        for (k, (lh, s)) in self.ln_abs.iter().zip(&self.signs).enumerate() {
            if *s == 0 {
                continue;
            }
            let j = j0 + k as f64;
            sum.add(f64::from(*s) * (lh + ln_gamma(j + eta) - (j + eta) * ln_n).exp());
        }
        sum.value()
    }

    /// JSON form: exact decimal-string coefficients, never floats.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "n": self.params.n,
            "m": self.params.m,
            "kind": "regular",
            "coeffs": self.h_terms().iter().map(|(j, h)| json!({
                "j": j,
                "num": h.numer().to_string(),
                "den": h.denom().to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A moment value: exact rational when the order is an integer, floating
/// point otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(Rational),
    Approx(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => r.to_f64(),
            MomentValue::Approx(v) => *v,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            MomentValue::Exact(r) => Some(r),
            MomentValue::Approx(_) => None,
        }
    }
}

impl fmt::Display for MomentValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MomentValue::Exact(r) => write!(f, "{r}"),
            MomentValue::Approx(v) => write!(f, "{v:.17e}"),
        }
    }
}

/// Exact identity between the recurrence output at `m = n+1` and the
/// associated Laguerre polynomial: `g_{n,n+1}(x) = Γ(n) L_{n−1}^{(2)}(−x)`.
pub fn laguerre_identity_check(n: u32) -> bool {
    let params = match EnsembleParams::new(n, n + 1) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let lhs = recurrence_g(params);
    let rhs = laguerre::laguerre_polynomial_exact(n - 1, 2)
        .compose_neg_x()
        .scale(&BigRational::from_integer(gamma_int(u64::from(n))));
    lhs == rhs
}

//! Associated Laguerre polynomials `L_k^{(α)}`: exact rational expansion,
//! double-precision evaluation by the upward three-term recurrence, and a
//! bit-scaled variant whose values stay representable when the direct
//! values would overflow `f64` (needed for marginal densities at large
//! argument, where `L_n^{(α)}(λ)` grows like `λ^n`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::exact::{factorial, gamma_ratio};
use crate::rational::RationalPolynomial;

/// Exact expansion
/// `L_k^{(α)}(x) = Σ_{i=0}^{k} (−1)^i C(k+α, k−i) x^i / i!`
/// as a rational-coefficient polynomial.
pub fn laguerre_polynomial_exact(k: u32, alpha: u32) -> RationalPolynomial {
    let k = u64::from(k);
    let alpha = u64::from(alpha);
    let coeffs = (0..=k)
        .map(|i| {
            // C(k+α, k−i) = Γ(k+α+1) / (Γ(k−i+1) Γ(α+i+1))
            let binom = gamma_ratio(k + alpha + 1, alpha + i + 1)
                / BigRational::from_integer(factorial(k - i));
            let sign = if i % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            binom * BigRational::new(sign, factorial(i))
        })
        .collect();
    RationalPolynomial::from_coeffs(coeffs)
}

/// Values `L_0^{(α)}(x) … L_k^{(α)}(x)` by the upward recurrence
/// `(j+1) L_{j+1} = (2j+α+1−x) L_j − (j+α) L_{j−1}`.
///
/// Plain doubles; overflows for large `k·x`. Use [`ScaledLaguerre`] there.
pub fn laguerre_values(k: u32, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(1.0);
    if k == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for j in 1..u64::from(k) {
        let jf = j as f64;
        let next = ((2.0 * jf + alpha + 1.0 - x) * out[j as usize]
            - (jf + alpha) * out[j as usize - 1])
            / (jf + 1.0);
        out.push(next);
    }
    out
}

/// A real number held as `mantissa · 2^exponent` with the mantissa kept in
/// `[1, 2)` (or zero). Supports exactly the operations the Laguerre
/// recurrence needs, with no overflow for any reachable magnitude.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    mantissa: f64,
    exponent: i64,
}

impl Scaled {
    pub fn zero() -> Self {
        Self {
            mantissa: 0.0,
            exponent: 0,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        let mut s = Self {
            mantissa: x,
            exponent: 0,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if self.mantissa == 0.0 || !self.mantissa.is_finite() {
            self.exponent = 0;
            return;
        }
        let (_, e) = frexp(self.mantissa);
        // keep mantissa in [1, 2)
        let shift = e - 1;
        self.mantissa = crate::numeric::ldexp(self.mantissa, -shift);
        self.exponent += shift;
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn mul_f64(mut self, c: f64) -> Self {
        self.mantissa *= c;
        self.normalize();
        self
    }

    pub fn mul(self, other: Scaled) -> Self {
        let mut r = Self {
            mantissa: self.mantissa * other.mantissa,
            exponent: self.exponent + other.exponent,
        };
        r.normalize();
        r
    }

    pub fn add(self, other: Scaled) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        // Align the smaller exponent onto the larger.
        let (big, small) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let delta = big.exponent - small.exponent;
        if delta > 200 {
            return big; // the small term is below 2^-200 relative: invisible
        }
        let mut r = Self {
            mantissa: big.mantissa + crate::numeric::ldexp(small.mantissa, -delta),
            exponent: big.exponent,
        };
        r.normalize();
        r
    }

    pub fn sub(self, other: Scaled) -> Self {
        self.add(other.neg())
    }

    pub fn neg(mut self) -> Self {
        self.mantissa = -self.mantissa;
        self
    }

    /// `ln|value|`; `None` when zero.
    pub fn ln_abs(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mantissa.abs().ln() + self.exponent as f64 * std::f64::consts::LN_2)
        }
    }

    pub fn signum(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// Collapse to `f64` (may over/underflow if the exponent is extreme;
    /// callers needing the log should use [`Self::ln_abs`]).
    pub fn to_f64(&self) -> f64 {
        crate::numeric::ldexp(self.mantissa, self.exponent)
    }
}

/// Split `x` into `(mantissa, exponent)` with mantissa in `[0.5, 1)`.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    if exp_field == 0 {
        // subnormal: scale up first
        let scaled = x * 2f64.powi(64);
        let (m, e) = frexp(scaled);
        return (m, e - 64);
    }
    let e = exp_field - 1022;
    let mantissa = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (mantissa, e)
}

/// Values `L_0^{(α)}(x) … L_k^{(α)}(x)` in bit-scaled form, by the same
/// upward recurrence, stable for arguments where the direct values exceed
/// `f64` range.
pub fn laguerre_values_scaled(k: u32, alpha: f64, x: f64) -> Vec<Scaled> {
    let mut out = Vec::with_capacity(k as usize + 1);
    out.push(Scaled::from_f64(1.0));
    if k == 0 {
        return out;
    }
    out.push(Scaled::from_f64(1.0 + alpha - x));
    for j in 1..u64::from(k) {
        let jf = j as f64;
        let term1 = out[j as usize].mul_f64((2.0 * jf + alpha + 1.0 - x) / (jf + 1.0));
        let term2 = out[j as usize - 1].mul_f64((jf + alpha) / (jf + 1.0));
        out.push(term1.sub(term2));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use num_rational::BigRational;

    #[test]
    fn exact_low_orders() {
        // L_0^{(a)} = 1; L_1^{(a)} = 1+a−x; L_2^{(0)} = x²/2 − 2x + 1.
        assert_eq!(laguerre_polynomial_exact(0, 5), RationalPolynomial::one());
        assert_eq!(
            laguerre_polynomial_exact(1, 2),
            RationalPolynomial::from_integers(&[3, -1])
        );
        let l2 = laguerre_polynomial_exact(2, 0);
        assert_eq!(Rational(l2.coeff(0)).to_string(), "1");
        assert_eq!(Rational(l2.coeff(1)).to_string(), "-2");
        assert_eq!(Rational(l2.coeff(2)).to_string(), "1/2");
    }

    #[test]
    fn recurrence_matches_exact_expansion() {
        for (k, alpha) in [(5u32, 0u32), (8, 2), (12, 3)] {
            let exact = laguerre_polynomial_exact(k, alpha);
            for &x in &[0.0, 0.37, 1.9, 11.4] {
                let vals = laguerre_values(k, f64::from(alpha), x);
                let direct = exact.eval_f64(x);
                let rel = (vals[k as usize] - direct).abs() / direct.abs().max(1.0);
                assert!(rel < 1e-11, "k={k} α={alpha} x={x}: {rel}");
            }
        }
    }

    #[test]
    fn scaled_recurrence_matches_plain_in_range() {
        let plain = laguerre_values(20, 4.0, 7.5);
        let scaled = laguerre_values_scaled(20, 4.0, 7.5);
        for (p, s) in plain.iter().zip(&scaled) {
            assert!((p - s.to_f64()).abs() <= 1e-10 * p.abs().max(1.0));
        }
    }

    #[test]
    fn scaled_survives_huge_arguments() {
        // L_75^{(50)}(3000): magnitude far beyond f64 range; the scaled
        // recurrence must stay finite and the exact expansion (evaluated in
        // rationals) must agree with its log.
        let k = 75u32;
        let alpha = 50u32;
        let x = 3000.0;
        let scaled = laguerre_values_scaled(k, f64::from(alpha), x);
        let top = scaled[k as usize];
        assert!(!top.is_zero());
        let exact = laguerre_polynomial_exact(k, alpha);
        let exact_val = exact.eval_rational(&BigRational::from_integer(3000.into()));
        let ln_exact = crate::numeric::ln_abs_ratio(exact_val.numer(), exact_val.denom())
            .unwrap()
            .value();
        let ln_scaled = top.ln_abs().unwrap();
        assert!(
            (ln_exact - ln_scaled).abs() < 1e-8 * ln_exact.abs(),
            "ln mismatch: {ln_scaled} vs {ln_exact}"
        );
        assert_eq!(
            top.signum(),
            if exact_val.numer().sign() == num_bigint::Sign::Minus {
                -1.0
            } else {
                1.0
            }
        );
    }

    #[test]
    fn scaled_arithmetic_basics() {
        let a = Scaled::from_f64(3.0);
        let b = Scaled::from_f64(-0.125);
        assert_eq!(a.mul(b).to_f64(), -0.375);
        assert_eq!(a.add(b).to_f64(), 2.875);
        assert_eq!(a.sub(a).to_f64(), 0.0);
        assert_eq!(Scaled::zero().add(a).to_f64(), 3.0);
    }
}

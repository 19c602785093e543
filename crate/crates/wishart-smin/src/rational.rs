//! Exact rational scalars and dense polynomials with `BigRational`
//! coefficients. These are the working types for every closed-form
//! identity in the crate; floating point only enters at evaluation time.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::numeric::rational_to_f64;

/// Exact rational scalar, a thin convenience wrapper over `BigRational`
/// providing display in `num/den` lowest-terms form and f64 conversion
/// that stays accurate at extreme magnitudes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_integer<T: Into<BigInt>>(v: T) -> Self {
        Rational(BigRational::from_integer(v.into()))
    }

    pub fn new<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> Self {
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    /// Numerator in lowest terms (sign carried here).
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Denominator in lowest terms (always positive).
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Rational {
    /// Canonical exact form: `num/den` in lowest terms, or just `num`
    /// when the denominator is 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

/// Dense univariate polynomial with exact rational coefficients,
/// `coeffs[k]` multiplying `x^k`. The representation is normalized:
/// no trailing zero coefficients (the zero polynomial is an empty vec).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::from_coeffs(vec![BigRational::one()])
    }

    /// `x` as a polynomial.
    pub fn x() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(ints: &[T]) -> Self {
        Self::from_coeffs(
            ints.iter()
                .map(|v| BigRational::from_integer(v.clone().into()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(out)
    }

    /// Substitute `x → −x` (negate odd-degree coefficients).
    pub fn compose_neg_x(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| if k % 2 == 1 { -a } else { a.clone() })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, a)| a * BigRational::from_integer(BigInt::from(i + 1)))
                .collect(),
        )
    }

    /// Exact evaluation at a rational point (Horner).
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// Floating-point evaluation (Horner on converted coefficients).
    /// Suitable only when coefficients and powers stay inside f64 range;
    /// large-parameter density evaluation goes through log-domain paths
    /// elsewhere instead.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for a in self.coeffs.iter().rev() {
            acc = acc * x + rational_to_f64(a);
        }
        acc
    }

    /// Largest absolute coefficient (for diagnostics/normalization).
    pub fn max_abs_coeff(&self) -> BigRational {
        self.coeffs
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if a.is_negative() { "-" } else { "+" })?;
            } else if a.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let mag = a.abs();
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                if mag.denom().is_one() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            match k {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{}", if show_coeff { "*" } else { "" }, k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(ints: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_integers(ints)
    }

    #[test]
    fn normalization_drops_trailing_zeros() {
        let p = RationalPolynomial::from_coeffs(vec![
            BigRational::one(),
            BigRational::zero(),
            BigRational::zero(),
        ]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(p, RationalPolynomial::one());
        assert!(RationalPolynomial::from_coeffs(vec![BigRational::zero()]).is_zero());
    }

    #[test]
    fn arithmetic_identities() {
        // (x+3)(x+4) = x^2 + 7x + 12
        let a = poly(&[3, 1]);
        let b = poly(&[4, 1]);
        assert_eq!(a.mul(&b), poly(&[12, 7, 1]));
        // derivative of x^2+8x+12 is 2x+8
        assert_eq!(poly(&[12, 8, 1]).derivative(), poly(&[8, 2]));
        // subtraction cancels to zero and normalizes
        assert!(a.sub(&a).is_zero());
        // shift_up multiplies by x^k
        assert_eq!(poly(&[1, 2]).shift_up(2), poly(&[0, 0, 1, 2]));
    }

    #[test]
    fn evaluation_matches_exact() {
        let p = poly(&[12, 8, 1]); // x^2+8x+12
        let x = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(
            p.eval_rational(&x),
            BigRational::new(BigInt::from(65), BigInt::from(4))
        );
        assert!((p.eval_f64(0.5) - 16.25).abs() < 1e-14);
    }

    #[test]
    fn display_exact_forms() {
        assert_eq!(Rational::new(3, 6).to_string(), "1/2");
        assert_eq!(Rational::from_integer(-7).to_string(), "-7");
        assert_eq!(poly(&[12, 8, 1]).to_string(), "x^2 + 8*x + 12");
        assert_eq!(poly(&[0, -1]).to_string(), "-x");
    }
}

//! Low-level numeric helpers: double-double arithmetic, bit-scaled
//! conversions from big integers/rationals to `f64`, and compensated
//! summation.
//!
//! The double-double type keeps an unevaluated sum `hi + lo` of two
//! doubles (~31 significant digits). It is used where a plain double's
//! 16 digits are demonstrably not enough: assembling `ln|h|` for
//! coefficients with tens of thousands of bits, and the cancellation-prone
//! Maclaurin region of the Airy function.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Double-double value `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// Error-free sum of two doubles (Knuth two-sum).
    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    /// Error-free product of two doubles via fused multiply-add.
    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        let err = f64::mul_add(a, b, -p);
        Self { hi: p, lo: err }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        let err = lo - (s - hi);
        Self { hi: s, lo: err }
    }

    pub fn add(self, other: Dd) -> Self {
        let s = Self::two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        Self::renorm(s.hi, lo)
    }

    pub fn add_f64(self, other: f64) -> Self {
        let s = Self::two_sum(self.hi, other);
        Self::renorm(s.hi, s.lo + self.lo)
    }

    pub fn sub(self, other: Dd) -> Self {
        self.add(Dd::new(-other.hi, -other.lo))
    }

    pub fn mul(self, other: Dd) -> Self {
        let p = Self::two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        Self::renorm(p.hi, lo)
    }

    pub fn mul_f64(self, other: f64) -> Self {
        let p = Self::two_prod(self.hi, other);
        Self::renorm(p.hi, p.lo + self.lo * other)
    }

    pub fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = Self::two_prod(q1, d); // exact q1·d, so the remainder keeps full precision
        let r = self.sub(p);
        let q2 = (r.hi + r.lo) / d;
        Self::renorm(q1, q2)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.hi, -self.lo)
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

/// `ln 2` to double-double precision.
pub const LN_2_DD: Dd = Dd::new(0.693147180559945286, 2.3190468138462996e-17);

/// `ln|x|` of a big integer as a double-double. Returns `None` for zero.
///
/// The top 64 bits give the mantissa (relative error ≤ 2⁻⁶³ on the value,
/// hence ≤ 1.1e-19 absolute on the log); the remaining power of two is
/// assembled as `(bits − 64) · ln2` in double-double so that multi-kilobit
/// magnitudes do not lose absolute accuracy in the log.
pub fn ln_abs_bigint(x: &BigInt) -> Option<Dd> {
    if x.is_zero() {
        return None;
    }
    let mag: &BigUint = x.magnitude();
    let bits = mag.bits();
    if bits <= 63 {
        let v = mag.to_u64().expect("fits") as f64;
        return Some(Dd::from_f64(v.ln()));
    }
    let shift = bits - 63;
    let top: u64 = (mag >> shift).to_u64().expect("63 bits fit");
    let mantissa_ln = (top as f64).ln();
    Some(LN_2_DD.mul_f64(shift as f64).add_f64(mantissa_ln))
}

/// `ln|p/q|` of a big rational as a double-double. `None` for zero.
pub fn ln_abs_ratio(num: &BigInt, den: &BigInt) -> Option<Dd> {
    Some(ln_abs_bigint(num)?.sub(ln_abs_bigint(den).expect("nonzero denominator")))
}

/// Multiply by 2^e without intermediate overflow/underflow (ldexp).
pub fn ldexp(x: f64, mut e: i64) -> f64 {
    let mut r = x;
    while e > 1023 {
        r *= 2f64.powi(1023);
        e -= 1023;
    }
    while e < -1022 {
        r *= 2f64.powi(-1022);
        e += 1022;
    }
    r * 2f64.powi(e as i32)
}

/// Convert `num/den` to the nearest-ish `f64` by bit scaling: the quotient is
/// formed with ≥ 63 significant bits regardless of magnitude, then scaled by
/// the tracked power of two. Handles magnitudes far outside the naive
/// `to_f64() / to_f64()` range (which would give `inf/inf = NaN`).
pub fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    assert!(!den.is_zero(), "zero denominator");
    let sign = if (num.sign() == Sign::Minus) ^ (den.sign() == Sign::Minus) {
        -1.0
    } else {
        1.0
    };
    let n = num.magnitude();
    let d = den.magnitude();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // Shift numerator so the integer quotient carries ~80 bits.
    let shift = db + 80 - nb;
    let q = if shift >= 0 {
        (n << shift as u64) / d
    } else {
        (n >> (-shift) as u64) / d
    };
    let qf = q.to_f64().expect("~80-bit integer converts");
    sign * ldexp(qf, -shift)
}

/// Convert a `BigRational` to `f64` via bit scaling.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    big_ratio_to_f64(x.numer(), x.denom())
}

/// Convert an `f64` to the exact `BigRational` it represents.
/// Every finite double is a dyadic rational, so this is lossless.
pub fn f64_to_rational(x: f64) -> BigRational {
    assert!(x.is_finite(), "not finite: {x}");
    if x == 0.0 {
        return BigRational::zero();
    }
    let bits = x.to_bits();
    let sign: i64 = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e2) = if exp == 0 {
        (frac, -1074i64) // subnormal
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let mant = BigInt::from(sign * mant as i64);
    if e2 >= 0 {
        BigRational::from_integer(mant << e2 as u64)
    } else {
        BigRational::new(mant, BigInt::from(1) << (-e2) as u64)
    }
}

/// Neumaier (improved Kahan) compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
    /// Running sum of |term|, for cancellation diagnostics.
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += term.abs();
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Cancellation indicator `κ = Σ|tᵢ| / |Σtᵢ|`; 1 when all terms share a
    /// sign, large when the result came out of massive cancellation.
    pub fn cancellation(&self) -> f64 {
        let v = self.value().abs();
        if v == 0.0 {
            if self.abs_sum == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_sum / v
        }
    }
}

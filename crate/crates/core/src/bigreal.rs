//! Binary arbitrary-precision real backed by `dashu-float`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu_float::round::mode::HalfEven;
use dashu_float::{DBig, FBig};
use num_traits::{One, Zero};

use crate::scalar::{Real, Scalar};

type Inner = FBig<HalfEven, 2>;

/// Precision used when neither operand carries one.
pub const DEFAULT_PRECISION: usize = 256;

/// Arbitrary-precision binary float. Precision (in bits) travels with each value;
/// binary operations use the larger precision of their operands.
#[derive(Clone, PartialEq)]
pub struct BigReal(Inner);

impl BigReal {
    pub fn with_precision(x: f64, bits: usize) -> Self {
        let v = Inner::try_from(x).expect("finite f64");
        Self(v.with_precision(bits.max(1)).value())
    }

    /// Parse a decimal literal such as `"3.14159"` or `"-1e-30"`.
    pub fn parse(s: &str, bits: usize) -> Self {
        let d = DBig::from_str(s).expect("decimal literal");
        let b = d
            .with_base_and_precision::<2>(bits)
            .value()
            .with_rounding::<HalfEven>();
        Self(b)
    }

    pub fn from_integer(x: i64, bits: usize) -> Self {
        Self(Inner::from(x).with_precision(bits).value())
    }

    pub fn precision(&self) -> usize {
        self.0.precision()
    }

    pub fn inner(&self) -> &FBig<HalfEven, 2> {
        &self.0
    }

    fn limited(&self) -> Inner {
        if self.0.precision() == 0 {
            self.0.clone().with_precision(DEFAULT_PRECISION).value()
        } else {
            self.0.clone()
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let d = self
            .limited()
            .with_base_and_precision::<10>(digits.max(1))
            .value();
        d.to_string()
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({}, {} bits)", self.to_decimal_string(30), self.precision())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.limited().precision() as f64) * std::f64::consts::LOG10_2) as usize;
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for BigReal {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Sub for BigReal {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Mul for BigReal {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl Div for BigReal {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        // exact / exact would need unlimited precision
        if self.0.precision() == 0 && rhs.0.precision() == 0 {
            return Self(self.limited() / rhs.0);
        }
        Self(self.0 / rhs.0)
    }
}

impl Neg for BigReal {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        Self(Inner::ZERO)
    }
    fn is_zero(&self) -> bool {
        self.0 == Inner::ZERO
    }
}

impl One for BigReal {
    fn one() -> Self {
        Self(Inner::ONE)
    }
}

impl Scalar for BigReal {
    fn as_f64(&self) -> f64 {
        self.0.to_f64().value()
    }

    fn ln_f64(&self) -> f64 {
        Real::ln(self).as_f64()
    }
}

impl Real for BigReal {
    fn lift(&self, x: f64) -> Self {
        let bits = match self.0.precision() {
            0 => DEFAULT_PRECISION,
            p => p,
        };
        Self::with_precision(x, bits)
    }

    fn ln(&self) -> Self {
        Self(self.limited().ln())
    }

    fn exp(&self) -> Self {
        Self(self.limited().exp())
    }

    fn sqrt(&self) -> Self {
        Self(self.limited().sqrt())
    }

    fn precision_bits(&self) -> usize {
        self.limited().precision()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_to_many_digits() {
        let two = BigReal::with_precision(2.0, 256);
        let ln2 = Real::ln(&two);
        let reference = BigReal::parse(
            "0.693147180559945309417232121458176568075500134360255254120680009493393621969694715605863",
            256,
        );
        assert!((ln2 - reference).abs().as_f64() < 1e-75);
    }

    #[test]
    fn precision_propagates_through_exact_constants() {
        let x = BigReal::with_precision(0.1, 200);
        let y = x.clone() + BigReal::one();
        assert_eq!(y.precision(), 200);
        let q = BigReal::one() / BigReal::from_integer(3, 0);
        assert_eq!(q.precision(), DEFAULT_PRECISION);
    }

    #[test]
    fn exp_inverts_ln_for_large_arguments() {
        let x = BigReal::with_precision(960.75, 256);
        let back = Real::ln(&Real::exp(&x));
        assert!((back - x).abs().as_f64() < 1e-60);
    }

    #[test]
    fn decimal_rendering() {
        let x = BigReal::with_precision(1.5, 64);
        assert_eq!(x.to_decimal_string(5), "1.5");
        let third = BigReal::one() / BigReal::from_integer(3, 64);
        assert_eq!(third.to_decimal_string(5), "0.33333");
    }
}

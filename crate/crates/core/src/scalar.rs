//! Scalar abstractions shared by the λ-tuple recursion, the rate equation and the
//! continuum series.
//!
//! [`Scalar`] is the positive-semifield arithmetic the branching process needs
//! (no subtraction ever occurs there), so exact rationals, IEEE floats and a
//! log-domain positive type all instantiate the same code path. [`Real`] adds
//! the transcendental functions used by the series and saddle-point code.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub trait Scalar:
    Clone + PartialOrd + Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    /// Nearest `f64`; may overflow to infinity or underflow to zero.
    fn as_f64(&self) -> f64;

    /// Natural logarithm as `f64`, valid even when [`Scalar::as_f64`] overflows.
    fn ln_f64(&self) -> f64 {
        self.as_f64().ln()
    }
}

impl Scalar for f64 {
    fn as_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn ln_f64(&self) -> f64 {
        // ratio of bit lengths keeps this finite for huge numerators
        let num = self.numer();
        let den = self.denom();
        ln_bigint(num) - ln_bigint(den)
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).abs().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN).abs();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A positive real stored as its natural logarithm.
///
/// Addition is a log-sum-exp, so values far beyond `f64::MAX` stay representable.
/// There is no subtraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPositive {
    ln: f64,
}

impl LogPositive {
    pub fn from_ln(ln: f64) -> Self {
        Self { ln }
    }

    pub fn from_value(x: f64) -> Self {
        Self { ln: x.ln() }
    }

    pub fn ln(&self) -> f64 {
        self.ln
    }
}

impl PartialOrd for LogPositive {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl Add for LogPositive {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.ln >= rhs.ln {
            (self.ln, rhs.ln)
        } else {
            (rhs.ln, self.ln)
        };
        if lo == f64::NEG_INFINITY {
            return Self { ln: hi };
        }
        Self {
            ln: hi + (lo - hi).exp().ln_1p(),
        }
    }
}

impl Mul for LogPositive {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self { ln: self.ln + rhs.ln }
    }
}

impl Div for LogPositive {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        Self { ln: self.ln - rhs.ln }
    }
}

impl Zero for LogPositive {
    fn zero() -> Self {
        Self {
            ln: f64::NEG_INFINITY,
        }
    }

    fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }
}

impl One for LogPositive {
    fn one() -> Self {
        Self { ln: 0.0 }
    }
}

impl Scalar for LogPositive {
    fn as_f64(&self) -> f64 {
        self.ln.exp()
    }

    fn ln_f64(&self) -> f64 {
        self.ln
    }
}

/// Real-number arithmetic with elementary functions, at the precision carried by
/// the values themselves.
pub trait Real: Scalar + Sub<Output = Self> + Neg<Output = Self> {
    /// Convert `x` to a value with the same precision as `self`.
    fn lift(&self, x: f64) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn sqrt(&self) -> Self;
    /// Significand precision in bits.
    fn precision_bits(&self) -> usize;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Convert a big integer, exactly when the precision allows.
    fn lift_bigint(&self, x: &BigInt) -> Self {
        let (sign, digits) = x.to_u32_digits();
        let base = self.lift(4294967296.0);
        let mut acc = Self::zero();
        for d in digits.iter().rev() {
            acc = acc * base.clone() + self.lift(*d as f64);
        }
        if sign == num_bigint::Sign::Minus {
            -acc
        } else {
            acc
        }
    }

    fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Real for f64 {
    fn lift(&self, x: f64) -> Self {
        x
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn precision_bits(&self) -> usize {
        53
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Real for f32 {
    fn lift(&self, x: f64) -> Self {
        x as f32
    }
    fn ln(&self) -> Self {
        f32::ln(*self)
    }
    fn exp(&self) -> Self {
        f32::exp(*self)
    }
    fn sqrt(&self) -> Self {
        f32::sqrt(*self)
    }
    fn precision_bits(&self) -> usize {
        24
    }
    fn abs(&self) -> Self {
        f32::abs(*self)
    }
}

/// Common constants at the precision of `like`.
pub fn ln2<T: Real>(like: &T) -> T {
    like.lift(2.0).ln()
}

/// π by Machin's formula, `16 atan(1/5) − 4 atan(1/239)`.
pub fn pi<T: Real>(like: &T) -> T {
    let sixteen = like.lift(16.0);
    let four = like.lift(4.0);
    sixteen * atan_inv(like, 5.0) - four * atan_inv(like, 239.0)
}

// atan(1/x) by its Taylor series; terms shrink by x^2 each step
fn atan_inv<T: Real>(like: &T, x: f64) -> T {
    let x2 = like.lift(x * x);
    let mut power = like.lift(1.0) / like.lift(x);
    let mut sum = power.clone();
    let eps = like.lift(2f64.powi(-(like.precision_bits() as i32) - 8));
    let mut k = 1u64;
    loop {
        power = power / x2.clone();
        let term = power.clone() / like.lift((2 * k + 1) as f64);
        if term < eps.clone() * sum.abs() {
            break;
        }
        if k % 2 == 1 {
            sum = sum - term;
        } else {
            sum = sum + term;
        }
        k += 1;
    }
    sum
}

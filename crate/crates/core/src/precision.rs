//! Working-precision management.
//!
//! All arbitrary-precision values are MPFR floats (`rug::Float`). A
//! [`PrecisionContext`] fixes the decimal working precision plus guard
//! digits and hands out floats at the matching binary precision.

use std::ops::{Add, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::AssignRound;
use rug::{Assign, Float};

use crate::error::{Error, Result};

/// Arbitrary-precision real.
pub type BigReal = Float;

pub const MIN_DIGITS: u32 = 15;
pub const MIN_GUARD: u32 = 5;
pub const DEFAULT_GUARD: u32 = 10;

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Decimal working precision with guard digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Precision(format!(
                "working precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        if guard < MIN_GUARD {
            return Err(Error::Precision(format!(
                "guard must be at least {MIN_GUARD} digits, got {guard}"
            )));
        }
        Ok(PrecisionContext { digits, guard })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Binary precision used for every float created under this context.
    pub fn bits(&self) -> u32 {
        bits_for_digits(self.digits + self.guard)
    }

    /// Same guard, `extra` more working digits.
    pub fn elevated(&self, extra: u32) -> Self {
        PrecisionContext {
            digits: self.digits + extra,
            guard: self.guard,
        }
    }

    pub fn real<T>(&self, value: T) -> BigReal
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> BigReal {
        Float::new(self.bits())
    }

    /// `10^-n` at working precision.
    pub fn pow10_neg(&self, n: u32) -> BigReal {
        let ten = self.real(10);
        let p = Float::with_val(self.bits(), rug::ops::Pow::pow(&ten, n));
        p.recip()
    }

    /// `10^-digits`.
    pub fn epsilon(&self) -> BigReal {
        self.pow10_neg(self.digits)
    }
}

pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * BITS_PER_DIGIT).ceil() as u32 + 8
}

/// Number of significant decimal digits that makes `to_decimal` lossless.
pub fn decimal_digits_for_bits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Full-precision decimal rendering (scientific notation).
pub fn to_decimal(x: &BigReal) -> String {
    to_decimal_digits(x, decimal_digits_for_bits(x.prec()))
}

/// Decimal rendering with `sig` significant digits.
pub fn to_decimal_digits(x: &BigReal, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(sig.max(1)))
}

pub fn parse_decimal(s: &str, ctx: &PrecisionContext) -> Result<BigReal> {
    parse_decimal_bits(s, ctx.bits())
}

pub fn parse_decimal_bits(s: &str, bits: u32) -> Result<BigReal> {
    let parsed = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    let mut out = Float::new(bits);
    out.assign_round(parsed, Round::Nearest);
    Ok(out)
}

/// `floor(-log10(abs_err / max(1, |rhs|)))`, clamped to `[0, cap]`.
pub fn digits_agreed(abs_err: &BigReal, rhs: &BigReal, cap: u32) -> u32 {
    if abs_err.is_zero() {
        return cap;
    }
    if !abs_err.is_finite() {
        return 0;
    }
    let prec = abs_err.prec().max(64);
    let scale = {
        let a = Float::with_val(prec, rhs.abs_ref());
        if a > 1 {
            a
        } else {
            Float::with_val(prec, 1)
        }
    };
    let rel = Float::with_val(prec, abs_err / &scale);
    let d = -rel.log10().to_f64();
    if d.is_nan() || d <= 0.0 {
        0
    } else {
        (d.floor() as u64).min(u64::from(cap)) as u32
    }
}

/// Complex value with arbitrary-precision parts.
#[derive(Debug, Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        BigComplex::new(Float::new(bits), Float::new(bits))
    }

    pub fn from_real(re: BigReal) -> Self {
        let im = Float::new(re.prec());
        BigComplex { re, im }
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(&self, k: &BigReal) -> Self {
        BigComplex::new(self.re.clone() * k, self.im.clone() * k)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = BigComplex::from_real(Float::with_val(self.re.prec(), 1));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `max(|re|, |im|)`.
    pub fn norm_max(&self) -> BigReal {
        let a = self.re.clone().abs();
        let b = self.im.clone().abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(self.re.clone() + &rhs.re, self.im.clone() + &rhs.im)
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(self.re.clone() - &rhs.re, self.im.clone() - &rhs.im)
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        let p = self.re.prec();
        let re = Float::with_val(p, &self.re * &rhs.re) - Float::with_val(p, &self.im * &rhs.im);
        let im = Float::with_val(p, &self.re * &rhs.im) + Float::with_val(p, &self.im * &rhs.re);
        BigComplex::new(re, im)
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-self.re, -self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(14).is_err());
        assert!(PrecisionContext::with_guard(30, 4).is_err());
        assert!(PrecisionContext::new(15).is_ok());
    }

    #[test]
    fn bits_cover_digits() {
        let ctx = PrecisionContext::new(45).unwrap();
        assert!(f64::from(ctx.bits()) >= 55.0 * 3.32);
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        let ctx = PrecisionContext::new(60).unwrap();
        let x = ctx.real(2).ln() / ctx.real(7);
        let s = to_decimal(&x);
        let y = parse_decimal(&s, &ctx).unwrap();
        assert_eq!(x, y);
        assert_eq!(to_decimal(&ctx.zero()), "0");
    }

    #[test]
    fn digits_agreed_examples() {
        let ctx = PrecisionContext::new(30).unwrap();
        let rhs = ctx.real(5);
        assert_eq!(digits_agreed(&ctx.pow10_neg(12), &rhs, 40), 12);
        assert_eq!(digits_agreed(&ctx.zero(), &rhs, 40), 40);
        let big = ctx.real(1000);
        let err = ctx.pow10_neg(20) * 2u32;
        assert_eq!(digits_agreed(&err, &big, 40), 22);
        assert_eq!(digits_agreed(&ctx.real(3), &rhs, 40), 0);
    }

    #[test]
    fn complex_power_matches_repeated_product() {
        let ctx = PrecisionContext::new(30).unwrap();
        let z = BigComplex::new(ctx.real(0.5), ctx.real(-1.25));
        let z4 = z.powi(4);
        let z2 = &z * &z;
        let expect = &z2 * &z2;
        let d = (&z4 - &expect).norm_max();
        assert!(d < ctx.epsilon());
    }
}

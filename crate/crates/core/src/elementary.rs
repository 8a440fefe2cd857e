//! Real elementary functions at working precision, with domain checks.
//!
//! Backed by MPFR; every result is correctly rounded at the context's
//! binary precision, which already carries the guard digits.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::precision::{BigReal, PrecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Ln,
    Exp,
    Sin,
    Cos,
    Tan,
    Cot,
    Arcsin,
    Arctan,
    Sqrt,
    /// Integer power.
    Powi(i32),
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Ln => "ln",
            Elementary::Exp => "exp",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Tan => "tan",
            Elementary::Cot => "cot",
            Elementary::Arcsin => "arcsin",
            Elementary::Arctan => "arctan",
            Elementary::Sqrt => "sqrt",
            Elementary::Powi(_) => "pow",
        }
    }
}

pub fn elementary(f: Elementary, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let x = Float::with_val(ctx.bits(), x);
    if x.is_nan() {
        return Err(Error::domain(f.name(), "argument is NaN"));
    }
    let out = match f {
        Elementary::Ln => {
            if x <= 0 {
                return Err(Error::domain(
                    "ln",
                    format!("non-positive argument {}", x.to_f64()),
                ));
            }
            x.ln()
        }
        Elementary::Exp => x.exp(),
        Elementary::Sin => x.sin(),
        Elementary::Cos => x.cos(),
        Elementary::Tan => {
            let c = Float::with_val(ctx.bits(), x.cos_ref());
            if c.is_zero() {
                return Err(Error::domain("tan", "pole"));
            }
            x.tan()
        }
        Elementary::Cot => {
            if x.is_zero() {
                return Err(Error::domain("cot", "pole at 0"));
            }
            x.cot()
        }
        Elementary::Arcsin => {
            if x.clone().abs() > 1 {
                return Err(Error::domain("arcsin", "|x| > 1"));
            }
            x.asin()
        }
        Elementary::Arctan => x.atan(),
        Elementary::Sqrt => {
            if x < 0 {
                return Err(Error::domain("sqrt", "negative argument"));
            }
            x.sqrt()
        }
        Elementary::Powi(n) => {
            if x.is_zero() && n < 0 {
                return Err(Error::domain("pow", "zero to a negative power"));
            }
            x.pow(n)
        }
    };
    if !out.is_finite() {
        return Err(Error::domain(f.name(), "result is not finite"));
    }
    Ok(out)
}

/// Real power `x^y` for `x > 0` (or `x = 0`, `y > 0`).
pub fn pow(x: &BigReal, y: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if *x < 0 || (x.is_zero() && *y <= 0) {
        return Err(Error::domain("pow", "base outside the real domain"));
    }
    let base = Float::with_val(ctx.bits(), x);
    Ok(base.pow(y))
}

pub fn pi(ctx: &PrecisionContext) -> BigReal {
    Float::with_val(ctx.bits(), rug::float::Constant::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn special_values() {
        let c = ctx();
        let eps = c.epsilon();
        assert!(elementary(Elementary::Ln, &c.real(1), &c)
            .unwrap()
            .is_zero());

        let asin_half = elementary(Elementary::Arcsin, &c.real(0.5), &c).unwrap();
        let sixth = pi(&c) / 6u32;
        assert!((asin_half - sixth).abs() < eps);

        let third = pi(&c) / 3u32;
        let cos = elementary(Elementary::Cos, &third, &c).unwrap();
        assert!((cos - 0.5f64).abs() < eps);
    }

    #[test]
    fn domain_errors() {
        let c = ctx();
        assert!(matches!(
            elementary(Elementary::Ln, &c.real(0), &c),
            Err(Error::Domain { func: "ln", .. })
        ));
        assert!(elementary(Elementary::Ln, &c.real(-2), &c).is_err());
        assert!(elementary(Elementary::Sqrt, &c.real(-1), &c).is_err());
        assert!(elementary(Elementary::Arcsin, &c.real(1.5), &c).is_err());
        assert!(elementary(Elementary::Cot, &c.real(0), &c).is_err());
        assert!(elementary(Elementary::Powi(-1), &c.real(0), &c).is_err());
        assert!(pow(&c.real(-2), &c.real(0.5), &c).is_err());
    }

    #[test]
    fn pow_and_powi_agree() {
        let c = ctx();
        let x = c.real(1.75);
        let a = elementary(Elementary::Powi(5), &x, &c).unwrap();
        let b = pow(&x, &c.real(5), &c).unwrap();
        assert!((a - b).abs() < c.epsilon());
    }
}

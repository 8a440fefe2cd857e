//! Building blocks for integrands on `[0, π/2]`.
//!
//! Each factor is written through the exact distances to both endpoints
//! (`x` and `π/2 - x`), so `ln cos x` near `π/2` and `ln sin x` near `0` keep
//! full relative precision.

use crate::expr::Expr;

pub fn x() -> Expr {
    Expr::from_left()
}

/// `ln sin x`
pub fn ln_sin() -> Expr {
    Expr::from_left().sin().ln()
}

/// `ln cos x = ln sin(π/2 - x)`
pub fn ln_cos() -> Expr {
    Expr::from_right().sin().ln()
}

/// `ln tan x`
pub fn ln_tan() -> Expr {
    ln_sin() - ln_cos()
}

/// `tan x = sin x / sin(π/2 - x)`
pub fn tan() -> Expr {
    Expr::from_left().sin() / Expr::from_right().sin()
}

pub fn cot() -> Expr {
    Expr::from_right().sin() / Expr::from_left().sin()
}

pub fn csc() -> Expr {
    Expr::int(1) / Expr::from_left().sin()
}

/// `x^a · ln^b sin x · ln^c cos x`
pub fn moment(a: i32, b: i32, c: i32) -> Expr {
    let mut e = Expr::int(1);
    if a > 0 {
        e = e * x().powi(a);
    }
    if b > 0 {
        e = e * ln_sin().powi(b);
    }
    if c > 0 {
        e = e * ln_cos().powi(c);
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Point;
    use crate::precision::PrecisionContext;
    use rug::Float;

    #[test]
    fn near_right_endpoint_keeps_precision() {
        let ctx = PrecisionContext::new(30).unwrap();
        let bits = ctx.bits();
        let half_pi = Float::with_val(bits, rug::float::Constant::Pi) / 2u32;
        let d = ctx.pow10_neg(60);
        let p = Point {
            x: Float::with_val(bits, &half_pi - &d),
            from_left: Float::with_val(bits, &half_pi - &d),
            from_right: Some(d.clone()),
        };
        // ln cos(π/2 - d) = ln sin d ≈ ln d
        let v = ln_cos().eval(&p, bits);
        let expect = d.clone().ln();
        assert!((v - expect).abs() < ctx.pow10_neg(25));
        let t = tan().eval(&p, bits) * &d;
        assert!((t - 1u32).abs() < ctx.pow10_neg(25));
    }
}

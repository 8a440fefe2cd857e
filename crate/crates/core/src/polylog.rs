//! Real polylogarithm `Li_m(z)` for `z ≤ 1`.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::constants::{bernoulli, zeta_em};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::precision::{BigReal, PrecisionContext};
use crate::quad::{integrate, Integrand, Interval};

#[derive(Debug, Clone, PartialEq)]
pub struct PolylogQuery {
    pub order: u32,
    pub z: BigReal,
}

impl PolylogQuery {
    pub fn new(order: u32, z: BigReal) -> Self {
        PolylogQuery { order, z }
    }

    fn validate(&self, func: &'static str) -> Result<()> {
        if self.order == 0 {
            return Err(Error::domain(func, "order must be at least 1"));
        }
        if !self.z.is_finite() {
            return Err(Error::domain(func, "argument is not finite"));
        }
        if self.z > 1 {
            return Err(Error::domain(
                func,
                format!("argument {} > 1", self.z.to_f64()),
            ));
        }
        Ok(())
    }
}

/// `Li_m(z)` to `ctx.digits()`.
pub fn li(q: &PolylogQuery, ctx: &PrecisionContext) -> Result<BigReal> {
    q.validate("li")?;
    let m = q.order;
    let bits = ctx.bits() + 32;
    let z = Float::with_val(bits, &q.z);
    let out = if m == 1 {
        if z == 1 {
            return Err(Error::domain("li", "Li_1 diverges at z = 1"));
        }
        -Float::with_val(bits, -z).ln_1p()
    } else {
        li_real(m, &z, bits)
    };
    Ok(Float::with_val(ctx.bits(), out))
}

fn zeta_bits(s: u32, bits: u32) -> BigReal {
    let digits = (f64::from(bits) / std::f64::consts::LOG2_10).ceil() as u32;
    let ctx = PrecisionContext::with_guard(digits.max(15), 5).expect("valid precision");
    Float::with_val(bits, zeta_em(s, &ctx))
}

/// `η(s) = (1 - 2^(1-s)) ζ(s)`
fn eta(s: u32, bits: u32) -> BigReal {
    let two = Float::with_val(bits, Float::i_exp(1, 1 - s as i32));
    (Float::with_val(bits, 1) - two) * zeta_bits(s, bits)
}

/// Order `m ≥ 2`, `z ≤ 1`.
fn li_real(m: u32, z: &BigReal, bits: u32) -> BigReal {
    let half = Float::with_val(bits, 0.5);
    if z.is_zero() {
        return Float::new(bits);
    }
    if *z == 1 {
        return zeta_bits(m, bits);
    }
    if *z == -1 {
        return -eta(m, bits);
    }
    let az = Float::with_val(bits, z.abs_ref());
    if az <= half {
        return direct_series(m, z, bits);
    }
    if *z > 0 {
        return log_expansion(m, z, bits);
    }
    if *z > -1 {
        // Li(z) = 2^(1-m) Li(z²) - Li(-z)
        let z2 = Float::with_val(bits, z.square_ref());
        let neg = Float::with_val(bits, -z);
        let scale = Float::with_val(bits, Float::i_exp(1, 1 - m as i32));
        return scale * li_real(m, &z2, bits) - li_real(m, &neg, bits);
    }
    inversion(m, &az, bits)
}

fn direct_series(m: u32, z: &BigReal, bits: u32) -> BigReal {
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8));
    let mut sum = Float::new(bits);
    let mut p = Float::with_val(bits, 1);
    let mut k = 1u32;
    loop {
        p *= z;
        let term = Float::with_val(bits, &p / Float::with_val(bits, k).pow(m));
        let small = Float::with_val(bits, term.abs_ref()) < tol;
        sum += term;
        if small {
            break;
        }
        k += 1;
    }
    sum
}

/// `ζ(-n)` for `n ≥ 0`.
fn zeta_nonpositive(n: u32) -> Rational {
    if n == 0 {
        return Rational::from((-1, 2));
    }
    let b = bernoulli(n as usize + 1);
    let v = b / Rational::from(n + 1);
    if n % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Expansion in `μ = ln z` for `1/2 < z < 1`:
/// `Li_m(e^μ) = Σ_{k≠m-1} ζ(m-k) μ^k/k! + μ^(m-1)/(m-1)! (H_{m-1} - ln(-μ))`.
fn log_expansion(m: u32, z: &BigReal, bits: u32) -> BigReal {
    let mu = Float::with_val(bits, z.ln_ref());
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8));
    let mut sum = Float::new(bits);
    let mut pow_over_fact = Float::with_val(bits, 1); // μ^k / k!
    let mut k = 0u32;
    let mut quiet = 0;
    loop {
        if k + 1 == m {
            let mut h = Rational::new();
            for j in 1..m {
                h += Rational::from((1, j));
            }
            let neg_mu = Float::with_val(bits, -&mu);
            let c = Float::with_val(bits, &h) - neg_mu.ln();
            sum += Float::with_val(bits, &pow_over_fact * &c);
        } else if k + 1 < m {
            sum += Float::with_val(bits, &pow_over_fact * zeta_bits(m - k, bits));
        } else {
            let zn = zeta_nonpositive(k - m);
            if zn != 0 {
                let term = Float::with_val(bits, &pow_over_fact * Float::with_val(bits, &zn));
                let small = Float::with_val(bits, term.abs_ref()) < tol;
                sum += term;
                quiet = if small { quiet + 1 } else { 0 };
                if quiet >= 2 {
                    break;
                }
            }
        }
        k += 1;
        pow_over_fact *= &mu;
        pow_over_fact /= k;
    }
    sum
}

/// `Li_m(-x)` for `x > 1`:
/// `Li_m(-x) = -(-1)^m Li_m(-1/x) - ln^m x/m! - 2 Σ_{j=1}^{⌊m/2⌋} ln^(m-2j) x/(m-2j)! η(2j)`.
fn inversion(m: u32, x: &BigReal, bits: u32) -> BigReal {
    let inv = Float::with_val(bits, x.recip_ref());
    let lx = Float::with_val(bits, x.ln_ref());
    let mut out = li_real(m, &(-inv), bits);
    if m.is_multiple_of(2) {
        out = -out;
    }
    let fact = |n: u32| Float::with_val(bits, Integer::from(Integer::factorial(n)));
    out -= Float::with_val(bits, (&lx).pow(m)) / fact(m);
    for j in 1..=m / 2 {
        let e = m - 2 * j;
        let t = Float::with_val(bits, (&lx).pow(e)) / fact(e) * eta(2 * j, bits);
        out -= t * 2u32;
    }
    out
}

/// Independent `Li_m(z)` via
/// `Li_m(z) = 1/(m-2)! ∫₀¹ (-ln u)^(m-2) (-ln(1 - z u)) / u du`,
/// the closed form of the repeated integral `∫₀^z Li_{m-1}(t)/t dt`.
pub fn li_oracle(q: &PolylogQuery, ctx: &PrecisionContext) -> Result<BigReal> {
    q.validate("li_oracle")?;
    let m = q.order;
    if m < 2 {
        return Err(Error::domain("li_oracle", "order must be at least 2"));
    }
    if q.z.is_zero() {
        return Ok(ctx.zero());
    }
    let inner = ctx.elevated(10);
    let bits = inner.bits();
    let z = Float::with_val(bits, &q.z);
    let one_minus_z = Float::with_val(bits, 1 - &z);
    let neg_ln_u = |near_one: bool| -> Expr {
        if near_one {
            -(-Expr::from_right()).ln1p()
        } else {
            -Expr::x().ln()
        }
    };
    let weight = |near_one: bool| -> Expr {
        if m == 2 {
            Expr::int(1)
        } else {
            neg_ln_u(near_one).powi(m as i32 - 2)
        }
    };
    // [0, 1/2]: -ln(1 - z u) = -ln1p(-z u)
    let left = weight(false) * -(-(Expr::real(z.clone()) * Expr::x())).ln1p() / Expr::x();
    // [1/2, 1]: 1 - z u = (1 - z) + z (1 - u)
    let right = weight(true)
        * -(Expr::real(one_minus_z) + Expr::real(z.clone()) * Expr::from_right()).ln()
        / Expr::x();
    let target = inner.digits() - 5;
    let a = integrate(
        &Integrand::new(left, Interval::finite(Expr::int(0), Expr::rat(1, 2))),
        &inner,
        target,
    )?;
    let b = integrate(
        &Integrand::new(right, Interval::finite(Expr::rat(1, 2), Expr::int(1))),
        &inner,
        target,
    )?;
    let fact = Float::with_val(bits, Integer::from(Integer::factorial(m - 2)));
    Ok(Float::with_val(ctx.bits(), (a.value + b.value) / fact))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn agree(a: &BigReal, b: &BigReal, digits: u32, c: &PrecisionContext) {
        let d = Float::with_val(c.bits(), a - b).abs();
        assert!(d < c.pow10_neg(digits), "{a} vs {b}: diff {d}");
    }

    fn li_at(m: u32, z: BigReal, c: &PrecisionContext) -> BigReal {
        li(&PolylogQuery::new(m, z), c).unwrap()
    }

    #[test]
    fn examples() {
        let c = ctx();
        agree(&li_at(1, c.real(0.5), &c), &c.real(2).ln(), 39, &c);
        let z2 = zeta_em(2, &c);
        agree(&li_at(2, c.real(1), &c), &z2, 39, &c);
        let z3 = zeta_em(3, &c);
        agree(&li_at(3, c.real(-1), &c), &(z3 * -0.75f64), 39, &c);
    }

    #[test]
    fn dilog_special_values() {
        let c = ctx();
        // Li2(1/2) = ζ(2)/2 - ln²2/2
        let ln2 = c.real(2).ln();
        let expect = zeta_em(2, &c) / 2u32 - ln2.square() / 2u32;
        agree(&li_at(2, c.real(0.5), &c), &expect, 39, &c);
        // Li2(-1) = -ζ(2)/2 ; continuity across the branches at ±1/2 and -1
        agree(&li_at(2, c.real(-1), &c), &(zeta_em(2, &c) / -2i32), 39, &c);
    }

    #[test]
    fn log_expansion_matches_series_near_half() {
        let c = ctx();
        let bits = c.bits() + 32;
        for m in 2..=5 {
            let z = Float::with_val(bits, 0.55);
            let a = log_expansion(m, &z, bits);
            let b = direct_series(m, &z, bits);
            agree(&a, &b, 39, &c);
        }
    }

    #[test]
    fn golden_ratio_dilog() {
        // Li2((3-√5)/2) = π²/15 - ln²((1+√5)/2)
        let c = ctx();
        let s5 = c.real(5).sqrt();
        let z = (c.real(3) - s5.clone()) / 2u32;
        let phi = (c.real(1) + s5) / 2u32;
        let pi = crate::elementary::pi(&c);
        let expect = pi.square() / 15u32 - phi.ln().square();
        agree(&li_at(2, z, &c), &expect, 39, &c);
    }

    #[test]
    fn domain() {
        let c = ctx();
        assert!(li(&PolylogQuery::new(2, c.real(1.5)), &c).is_err());
        assert!(li(&PolylogQuery::new(0, c.real(0.5)), &c).is_err());
        assert!(li(&PolylogQuery::new(1, c.real(1)), &c).is_err());
        assert!(li_oracle(&PolylogQuery::new(1, c.real(0.5)), &c).is_err());
        assert!(li_oracle(&PolylogQuery::new(2, c.real(0)), &c)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn oracle_agrees() {
        let c = ctx();
        for (m, z) in [(2, 0.5), (3, -2.0), (5, 1.0), (4, -0.75)] {
            let a = li_at(m, c.real(z), &c);
            let b = li_oracle(&PolylogQuery::new(m, c.real(z)), &c).unwrap();
            agree(&a, &b, 32, &c);
        }
    }

    #[test]
    fn zeta_at_nonpositive() {
        assert_eq!(zeta_nonpositive(1), Rational::from((-1, 12)));
        assert_eq!(zeta_nonpositive(2), 0);
        assert_eq!(zeta_nonpositive(3), Rational::from((1, 120)));
    }
}

//! Composable integrand expressions.
//!
//! Besides the abscissa `x`, an expression can read the exact distances
//! from the integration endpoints (`x - a` and `b - x`). Quadrature nodes
//! cluster at the endpoints, where `b - x` recomputed from `x` would lose
//! all precision; writing `ln(cos x)` on `[0, π/2]` as `ln(sin(π/2 - x))`
//! with the exact distance keeps it accurate all the way in.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::precision::{BigComplex, BigReal};

/// Where an integrand is sampled: abscissa plus exact endpoint distances.
#[derive(Debug, Clone)]
pub struct Point {
    pub x: BigReal,
    pub from_left: BigReal,
    /// `None` on a semi-infinite interval.
    pub from_right: Option<BigReal>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Ln,
    /// `ln(1 + u)`
    Ln1p,
    Exp,
    Sin,
    Cos,
    Tan,
    Cot,
    Csc,
    Atan,
    Asin,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    X,
    FromLeft,
    FromRight,
    Num(Rational),
    Real(BigReal),
    Pi,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Powi(Box<Expr>, i32),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn x() -> Expr {
        Expr::X
    }

    pub fn from_left() -> Expr {
        Expr::FromLeft
    }

    pub fn from_right() -> Expr {
        Expr::FromRight
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from(n))
    }

    pub fn rat(num: i64, den: i64) -> Expr {
        Expr::Num(Rational::from((num, den)))
    }

    pub fn real(v: BigReal) -> Expr {
        Expr::Real(v)
    }

    pub fn pi() -> Expr {
        Expr::Pi
    }

    fn apply(self, f: Func) -> Expr {
        Expr::Apply(f, Box::new(self))
    }

    pub fn ln(self) -> Expr {
        self.apply(Func::Ln)
    }
    pub fn ln1p(self) -> Expr {
        self.apply(Func::Ln1p)
    }
    pub fn exp(self) -> Expr {
        self.apply(Func::Exp)
    }
    pub fn sin(self) -> Expr {
        self.apply(Func::Sin)
    }
    pub fn cos(self) -> Expr {
        self.apply(Func::Cos)
    }
    pub fn tan(self) -> Expr {
        self.apply(Func::Tan)
    }
    pub fn cot(self) -> Expr {
        self.apply(Func::Cot)
    }
    pub fn csc(self) -> Expr {
        self.apply(Func::Csc)
    }
    pub fn atan(self) -> Expr {
        self.apply(Func::Atan)
    }
    pub fn asin(self) -> Expr {
        self.apply(Func::Asin)
    }
    pub fn sqrt(self) -> Expr {
        self.apply(Func::Sqrt)
    }

    pub fn powi(self, n: i32) -> Expr {
        match n {
            1 => self,
            _ => Expr::Powi(Box::new(self), n),
        }
    }

    /// Whether the expression reads any of `x`, `x - a`, `b - x`.
    pub fn has_variable(&self) -> bool {
        match self {
            Expr::X | Expr::FromLeft | Expr::FromRight => true,
            Expr::Num(_) | Expr::Real(_) | Expr::Pi => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.has_variable() || b.has_variable()
            }
            Expr::Neg(a) | Expr::Powi(a, _) | Expr::Apply(_, a) => a.has_variable(),
        }
    }

    /// Evaluate at `bits` of precision. Domain violations surface as
    /// NaN or infinities rather than errors.
    pub fn eval(&self, p: &Point, bits: u32) -> BigReal {
        match self {
            Expr::X => Float::with_val(bits, &p.x),
            Expr::FromLeft => Float::with_val(bits, &p.from_left),
            Expr::FromRight => match &p.from_right {
                Some(d) => Float::with_val(bits, d),
                None => Float::with_val(bits, rug::float::Special::Nan),
            },
            Expr::Num(q) => Float::with_val(bits, q),
            Expr::Real(v) => Float::with_val(bits, v),
            Expr::Pi => Float::with_val(bits, rug::float::Constant::Pi),
            Expr::Add(a, b) => a.eval(p, bits) + b.eval(p, bits),
            Expr::Sub(a, b) => a.eval(p, bits) - b.eval(p, bits),
            Expr::Mul(a, b) => a.eval(p, bits) * b.eval(p, bits),
            Expr::Div(a, b) => a.eval(p, bits) / b.eval(p, bits),
            Expr::Neg(a) => -a.eval(p, bits),
            Expr::Powi(a, n) => a.eval(p, bits).pow(*n),
            Expr::Apply(f, a) => {
                let v = a.eval(p, bits);
                match f {
                    Func::Ln => v.ln(),
                    Func::Ln1p => v.ln_1p(),
                    Func::Exp => v.exp(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Tan => v.tan(),
                    Func::Cot => v.cot(),
                    Func::Csc => v.csc(),
                    Func::Atan => v.atan(),
                    Func::Asin => v.asin(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// Evaluate a variable-free expression.
    pub fn eval_const(&self, bits: u32) -> BigReal {
        let nan = Float::with_val(bits, rug::float::Special::Nan);
        let p = Point {
            x: nan.clone(),
            from_left: nan.clone(),
            from_right: Some(nan),
        };
        self.eval(&p, bits)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Func::Ln => "ln",
            Func::Ln1p => "ln1p",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Csc => "csc",
            Func::Atan => "atan",
            Func::Asin => "asin",
            Func::Sqrt => "sqrt",
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::X => f.write_str("x"),
            Expr::FromLeft => f.write_str("(x-a)"),
            Expr::FromRight => f.write_str("(b-x)"),
            Expr::Num(q) => write!(f, "{q}"),
            Expr::Real(v) => write!(f, "{}", v.to_f64()),
            Expr::Pi => f.write_str("π"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}·{b}"),
            Expr::Div(a, b) => write!(f, "{a}/{b}"),
            Expr::Neg(a) => write!(f, "-{a}"),
            Expr::Powi(a, n) => write!(f, "{a}^{n}"),
            Expr::Apply(func, a) => write!(f, "{func}({a})"),
        }
    }
}

/// Complex-valued integrand expressions built over real ones.
#[derive(Debug, Clone, PartialEq)]
pub enum CExpr {
    Real(Expr),
    /// `ln(1 + i·u) = ½ ln(1 + u²) + i·atan(u)`
    Ln1pI(Expr),
    Add(Box<CExpr>, Box<CExpr>),
    Mul(Box<CExpr>, Box<CExpr>),
    Powi(Box<CExpr>, u32),
    /// Divide by a real expression.
    DivReal(Box<CExpr>, Expr),
}

impl CExpr {
    pub fn ln1p_i(u: Expr) -> CExpr {
        CExpr::Ln1pI(u)
    }

    pub fn powi(self, n: u32) -> CExpr {
        CExpr::Powi(Box::new(self), n)
    }

    pub fn div_real(self, d: Expr) -> CExpr {
        CExpr::DivReal(Box::new(self), d)
    }

    pub fn eval(&self, p: &Point, bits: u32) -> BigComplex {
        match self {
            CExpr::Real(e) => BigComplex::from_real(e.eval(p, bits)),
            CExpr::Ln1pI(u) => {
                let u = u.eval(p, bits);
                let re = Float::with_val(bits, u.square_ref()).ln_1p() / 2u32;
                BigComplex::new(re, u.atan())
            }
            CExpr::Add(a, b) => &a.eval(p, bits) + &b.eval(p, bits),
            CExpr::Mul(a, b) => &a.eval(p, bits) * &b.eval(p, bits),
            CExpr::Powi(a, n) => a.eval(p, bits).powi(*n),
            CExpr::DivReal(a, d) => {
                let d = d.eval(p, bits).recip();
                a.eval(p, bits).scale(&d)
            }
        }
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CExpr::Real(e) => write!(f, "{e}"),
            CExpr::Ln1pI(u) => write!(f, "ln(1+i·{u})"),
            CExpr::Add(a, b) => write!(f, "({a} + {b})"),
            CExpr::Mul(a, b) => write!(f, "{a}·{b}"),
            CExpr::Powi(a, n) => write!(f, "{a}^{n}"),
            CExpr::DivReal(a, d) => write!(f, "{a}/({d})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(x: f64, a: f64, b: f64, bits: u32) -> Point {
        Point {
            x: Float::with_val(bits, x),
            from_left: Float::with_val(bits, x - a),
            from_right: Some(Float::with_val(bits, b - x)),
        }
    }

    #[test]
    fn evaluates_compositions() {
        let bits = 128;
        let p = point(0.25, 0.0, 1.0, bits);
        // x^2 ln(1 - x) with the exact right distance
        let e = Expr::x().powi(2) * Expr::from_right().ln();
        let expect = 0.0625 * (0.75f64).ln();
        assert!((e.eval(&p, bits).to_f64() - expect).abs() < 1e-15);
        assert!(e.has_variable());
        assert!(!(Expr::pi() / Expr::int(2)).has_variable());
    }

    #[test]
    fn domain_violation_is_not_finite() {
        let bits = 64;
        let p = point(0.5, 0.0, 1.0, bits);
        let e = (Expr::x() - Expr::int(1)).ln();
        assert!(!e.eval(&p, bits).is_finite());
        assert!(!Expr::from_right().eval_const(bits).is_finite());
    }

    #[test]
    fn complex_log_identity() {
        // ln(1+ix) = ½ln(1+x²) + i atan x, so |1+ix| = e^{re}
        let bits = 128;
        let p = point(2.0, 0.0, 3.0, bits);
        let z = CExpr::ln1p_i(Expr::x()).eval(&p, bits);
        assert!((z.re.to_f64() - 0.5 * 5f64.ln()).abs() < 1e-15);
        assert!((z.im.to_f64() - 2f64.atan()).abs() < 1e-15);
        let z4 = CExpr::ln1p_i(Expr::x())
            .powi(4)
            .div_real(Expr::x().powi(2))
            .eval(&p, bits);
        let w = z.powi(4).scale(&Float::with_val(bits, 0.25));
        assert!((&z4 - &w).norm_max().to_f64() < 1e-30);
    }
}

//! Double-exponential quadrature at arbitrary precision.
//!
//! Finite intervals use tanh-sinh, `x = tanh(π/2 · sinh t)`; `[a, ∞)` uses
//! exp-sinh, `x = a + exp(π/2 · sinh t)`. Both apply the trapezoid rule in
//! `t` with the step halved per level, so level `L` only evaluates the new
//! odd nodes. Node tables are cached per `(bits, kind)` and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::expr::{CExpr, Expr, Point};
use crate::precision::{to_decimal_digits, BigComplex, BigReal, PrecisionContext};

pub const MAX_LEVEL: u32 = 14;
const MIN_LEVEL: u32 = 3;

/// Endpoint behaviour of an integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Singularity {
    None,
    LogPower,
    Algebraic,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Interval {
    Finite { a: Expr, b: Expr },
    SemiInfinite { a: Expr },
}

impl Interval {
    pub fn finite(a: Expr, b: Expr) -> Self {
        Interval::Finite { a, b }
    }

    pub fn unit() -> Self {
        Interval::finite(Expr::int(0), Expr::int(1))
    }

    /// `[0, π/2]`
    pub fn quarter_period() -> Self {
        Interval::finite(Expr::int(0), Expr::pi() / Expr::int(2))
    }

    pub fn half_line() -> Self {
        Interval::SemiInfinite { a: Expr::int(0) }
    }
}

/// Something the quadrature can sample.
pub trait Sample: Sync {
    type Value: QuadValue;
    fn sample(&self, p: &Point, bits: u32) -> Self::Value;
}

impl Sample for Expr {
    type Value = BigReal;
    fn sample(&self, p: &Point, bits: u32) -> BigReal {
        self.eval(p, bits)
    }
}

impl Sample for CExpr {
    type Value = BigComplex;
    fn sample(&self, p: &Point, bits: u32) -> BigComplex {
        self.eval(p, bits)
    }
}

/// Arithmetic the trapezoid sums need, for real and complex values.
pub trait QuadValue: Clone + Send + Sync + std::fmt::Debug {
    fn zero(bits: u32) -> Self;
    fn finite(&self) -> bool;
    fn add_scaled(&mut self, v: &Self, w: &BigReal);
    fn scaled(&self, w: &BigReal) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    /// max-norm
    fn magnitude(&self) -> BigReal;
    fn round_to(&self, bits: u32) -> Self;
    fn describe(&self) -> String;
}

impl QuadValue for BigReal {
    fn zero(bits: u32) -> Self {
        Float::new(bits)
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
    fn add_scaled(&mut self, v: &Self, w: &BigReal) {
        *self += Float::with_val(self.prec(), v * w);
    }
    fn scaled(&self, w: &BigReal) -> Self {
        self.clone() * w
    }
    fn plus(&self, other: &Self) -> Self {
        self.clone() + other
    }
    fn minus(&self, other: &Self) -> Self {
        self.clone() - other
    }
    fn magnitude(&self) -> BigReal {
        self.clone().abs()
    }
    fn round_to(&self, bits: u32) -> Self {
        Float::with_val(bits, self)
    }
    fn describe(&self) -> String {
        to_decimal_digits(self, 20)
    }
}

impl QuadValue for BigComplex {
    fn zero(bits: u32) -> Self {
        BigComplex::zero(bits)
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
    fn add_scaled(&mut self, v: &Self, w: &BigReal) {
        self.re.add_scaled(&v.re, w);
        self.im.add_scaled(&v.im, w);
    }
    fn scaled(&self, w: &BigReal) -> Self {
        self.scale(w)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn magnitude(&self) -> BigReal {
        self.norm_max()
    }
    fn round_to(&self, bits: u32) -> Self {
        BigComplex::new(
            Float::with_val(bits, &self.re),
            Float::with_val(bits, &self.im),
        )
    }
    fn describe(&self) -> String {
        format!(
            "{} + {}i",
            to_decimal_digits(&self.re, 20),
            to_decimal_digits(&self.im, 20)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integrand<F> {
    pub body: F,
    pub interval: Interval,
    /// `[left, right]` endpoint hints.
    pub hints: [Singularity; 2],
}

impl<F> Integrand<F> {
    pub fn new(body: F, interval: Interval) -> Self {
        Integrand {
            body,
            interval,
            hints: [Singularity::LogPower, Singularity::LogPower],
        }
    }

    pub fn with_hints(mut self, left: Singularity, right: Singularity) -> Self {
        self.hints = [left, right];
        self
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<V> {
    pub value: V,
    /// Absolute error estimate `|S_L - S_{L-1}|`, floored at `10^-target`.
    pub err_estimate: BigReal,
    pub levels_used: u32,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    TanhSinh,
    ExpSinh,
}

/// One abscissa of a node table, in reduced form.
///
/// tanh-sinh (`t > 0`): `gap = 1 - x` on `[-1, 1]`, mirrored at `-t`.
/// exp-sinh: `gap = x` on `[0, ∞)`. The central tanh-sinh node is
/// `gap = 1` and is not mirrored.
#[derive(Debug, Clone)]
struct Node {
    gap: BigReal,
    weight: BigReal,
    /// log2 of the weight, for cut-offs
    weight_exp: i64,
    /// log2 of the gap
    gap_exp: i64,
    center: bool,
}

struct Table {
    bits: u32,
    kind: Kind,
    levels: Mutex<Vec<Arc<Vec<Node>>>>,
}

type TableMap = HashMap<(u32, Kind), Arc<Table>>;

fn table(bits: u32, kind: Kind) -> Arc<Table> {
    static TABLES: OnceLock<RwLock<TableMap>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables
        .read()
        .expect("node tables poisoned")
        .get(&(bits, kind))
    {
        return t.clone();
    }
    let mut w = tables.write().expect("node tables poisoned");
    w.entry((bits, kind))
        .or_insert_with(|| {
            Arc::new(Table {
                bits,
                kind,
                levels: Mutex::new(Vec::new()),
            })
        })
        .clone()
}

fn exp2_of(x: &BigReal) -> i64 {
    x.get_exp().map_or(i64::MIN / 4, i64::from)
}

impl Table {
    fn level(&self, level: u32) -> Arc<Vec<Node>> {
        let mut levels = self.levels.lock().expect("node level poisoned");
        while levels.len() <= level as usize {
            let l = levels.len() as u32;
            levels.push(Arc::new(self.build(l)));
        }
        levels[level as usize].clone()
    }

    /// Nodes new at `level`: all integers at level 0, odd multiples of
    /// `2^-level` after that.
    fn build(&self, level: u32) -> Vec<Node> {
        let bits = self.bits;
        let wbits = bits + 32;
        let h = Float::with_val(wbits, Float::i_exp(1, -(level as i32)));
        let half_pi = Float::with_val(wbits, rug::float::Constant::Pi) / 2u32;
        // Tables extend far enough for algebraic endpoint singularities.
        let deep = -(2 * i64::from(bits) + 64);
        let far = 2 * i64::from(bits) + 64;
        let mut nodes = Vec::new();
        let (start, step) = if level == 0 { (0u64, 1u64) } else { (1, 2) };
        match self.kind {
            Kind::TanhSinh => {
                let mut j = start;
                loop {
                    let t = Float::with_val(wbits, &h * j);
                    if j == 0 {
                        nodes.push(Node {
                            gap: Float::with_val(bits, 1),
                            weight: Float::with_val(bits, &half_pi),
                            weight_exp: 1,
                            gap_exp: 1,
                            center: true,
                        });
                        j += step;
                        continue;
                    }
                    let u = Float::with_val(wbits, t.sinh_ref()) * &half_pi;
                    let e = Float::with_val(wbits, -u.clone() * 2u32).exp();
                    let one_e = Float::with_val(wbits, 1) + &e;
                    let gap = Float::with_val(wbits, &e * 2u32) / &one_e;
                    let weight = Float::with_val(wbits, t.cosh_ref()) * &half_pi * &e * 4u32
                        / Float::with_val(wbits, one_e.square_ref());
                    let weight_exp = exp2_of(&weight);
                    if weight_exp < deep {
                        break;
                    }
                    nodes.push(Node {
                        gap_exp: exp2_of(&gap),
                        gap: Float::with_val(bits, gap),
                        weight: Float::with_val(bits, weight),
                        weight_exp,
                        center: false,
                    });
                    j += step;
                }
            }
            Kind::ExpSinh => {
                for sign in [1i32, -1] {
                    let mut j = if sign < 0 && start == 0 { 1 } else { start };
                    loop {
                        let t = Float::with_val(wbits, &h * j) * sign;
                        let s = Float::with_val(wbits, t.sinh_ref()) * &half_pi;
                        let x = s.exp();
                        let weight = Float::with_val(wbits, t.cosh_ref()) * &half_pi * &x;
                        let gap_exp = exp2_of(&x);
                        if gap_exp > far || gap_exp < deep {
                            break;
                        }
                        nodes.push(Node {
                            gap_exp,
                            weight_exp: exp2_of(&weight),
                            gap: Float::with_val(bits, x),
                            weight: Float::with_val(bits, weight),
                            center: false,
                        });
                        j += step;
                    }
                }
            }
        }
        nodes
    }
}

/// Numeric form of an interval at a given precision.
enum Bounds {
    Finite {
        a: BigReal,
        b: BigReal,
        half: BigReal,
    },
    SemiInfinite {
        a: BigReal,
    },
}

impl Bounds {
    fn resolve(interval: &Interval, bits: u32) -> Result<Bounds> {
        let check = |v: BigReal, which: &str| -> Result<BigReal> {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::domain(
                    "integrate",
                    format!("{which} endpoint is not finite"),
                ))
            }
        };
        match interval {
            Interval::Finite { a, b } => {
                let a = check(a.eval_const(bits), "left")?;
                let b = check(b.eval_const(bits), "right")?;
                if b <= a {
                    return Err(Error::domain("integrate", "empty or reversed interval"));
                }
                let half = Float::with_val(bits, &b - &a) / 2u32;
                Ok(Bounds::Finite { a, b, half })
            }
            Interval::SemiInfinite { a } => Ok(Bounds::SemiInfinite {
                a: check(a.eval_const(bits), "left")?,
            }),
        }
    }
}

/// A physical sample: point and its weight (without the step `h`).
struct Sampled {
    point: Point,
    weight: BigReal,
}

fn cutoff(hint: Singularity, bits: u32) -> i64 {
    match hint {
        Singularity::Algebraic => -(2 * i64::from(bits) + 64),
        Singularity::LogPower | Singularity::None => -(i64::from(bits) + 64),
    }
}

fn samples(nodes: &[Node], bounds: &Bounds, hints: [Singularity; 2], bits: u32) -> Vec<Sampled> {
    let mut out = Vec::with_capacity(2 * nodes.len());
    match bounds {
        Bounds::Finite { a, b, half } => {
            let width = Float::with_val(bits, b - a);
            for n in nodes {
                if n.center {
                    let mid = Float::with_val(bits, a + half);
                    out.push(Sampled {
                        point: Point {
                            x: mid,
                            from_left: half.clone(),
                            from_right: Some(half.clone()),
                        },
                        weight: Float::with_val(bits, &n.weight * half),
                    });
                    continue;
                }
                let near = Float::with_val(bits, &n.gap * half);
                let far = Float::with_val(bits, &width - &near);
                let w = Float::with_val(bits, &n.weight * half);
                for (side, hint) in hints.iter().enumerate() {
                    if n.weight_exp < cutoff(*hint, bits) {
                        continue;
                    }
                    let point = if side == 0 {
                        Point {
                            x: Float::with_val(bits, a + &near),
                            from_left: near.clone(),
                            from_right: Some(far.clone()),
                        }
                    } else {
                        Point {
                            x: Float::with_val(bits, b - &near),
                            from_left: far.clone(),
                            from_right: Some(near.clone()),
                        }
                    };
                    out.push(Sampled {
                        point,
                        weight: w.clone(),
                    });
                }
            }
        }
        Bounds::SemiInfinite { a } => {
            for n in nodes {
                let right_side = n.gap_exp > 0;
                let limit = if right_side {
                    // tail at infinity: stop once x passes 2^(bits+64) unless algebraic
                    match hints[1] {
                        Singularity::Algebraic => i64::MAX,
                        _ => i64::from(bits) + 64,
                    }
                } else {
                    i64::MAX
                };
                if right_side && n.gap_exp > limit {
                    continue;
                }
                if !right_side && n.weight_exp < cutoff(hints[0], bits) {
                    continue;
                }
                out.push(Sampled {
                    point: Point {
                        x: Float::with_val(bits, a + &n.gap),
                        from_left: n.gap.clone(),
                        from_right: None,
                    },
                    weight: n.weight.clone(),
                });
            }
        }
    }
    out
}

fn eval_all<F: Sample>(f: &F, pts: &[Sampled], bits: u32) -> Result<F::Value> {
    let values: Vec<Result<F::Value>> = pts
        .par_iter()
        .map(|s| {
            let mut v = f.sample(&s.point, bits);
            if !v.finite() {
                // retry with extra guard precision before giving up
                v = f.sample(&s.point, 2 * bits).round_to(bits);
            }
            if v.finite() {
                Ok(v)
            } else {
                Err(Error::Integrand {
                    at: to_decimal_digits(&s.point.x, 25),
                })
            }
        })
        .collect();
    let mut acc = F::Value::zero(bits);
    for (v, s) in values.into_iter().zip(pts) {
        acc.add_scaled(&v?, &s.weight);
    }
    Ok(acc)
}

fn kind_of(interval: &Interval) -> Kind {
    match interval {
        Interval::Finite { .. } => Kind::TanhSinh,
        Interval::SemiInfinite { .. } => Kind::ExpSinh,
    }
}

/// Trapezoid sums `S_0, ..., S_max_level` for an integrand.
pub fn level_sums<F: Sample>(
    f: &Integrand<F>,
    ctx: &PrecisionContext,
    max_level: u32,
) -> Result<Vec<F::Value>> {
    let mut out = Vec::new();
    run_levels(f, ctx, max_level, |s, _| {
        out.push(s.clone());
        false
    })?;
    Ok(out)
}

/// Drive levels `0..=max_level`; `stop(S_L, L)` ends early when it returns true.
/// Returns (final sum, level reached, evaluations).
fn run_levels<F: Sample>(
    f: &Integrand<F>,
    ctx: &PrecisionContext,
    max_level: u32,
    mut stop: impl FnMut(&F::Value, u32) -> bool,
) -> Result<(F::Value, u32, usize)> {
    let bits = ctx.bits();
    let bounds = Bounds::resolve(&f.interval, bits)?;
    let tab = table(bits, kind_of(&f.interval));
    let mut evaluations = 0;
    let mut sum = F::Value::zero(bits);
    for level in 0..=max_level {
        let nodes = tab.level(level);
        let pts = samples(&nodes, &bounds, f.hints, bits);
        evaluations += pts.len();
        let fresh = eval_all(&f.body, &pts, bits)?;
        let h = Float::with_val(bits, Float::i_exp(1, -(level as i32)));
        sum = if level == 0 {
            fresh
        } else {
            let half = Float::with_val(bits, 0.5);
            sum.scaled(&half).plus(&fresh.scaled(&h))
        };
        if stop(&sum, level) {
            return Ok((sum, level, evaluations));
        }
    }
    Ok((sum, max_level, evaluations))
}

fn integrate_generic<F: Sample>(
    f: &Integrand<F>,
    ctx: &PrecisionContext,
    target_digits: u32,
) -> Result<QuadResult<F::Value>> {
    if target_digits + 5 > ctx.digits() {
        return Err(Error::Precision(format!(
            "target {target_digits} digits needs working precision of at least {} digits",
            target_digits + 5
        )));
    }
    let bits = ctx.bits();
    let tol = ctx.pow10_neg(target_digits);
    let mut prev: Option<F::Value> = None;
    let mut last_err = Float::with_val(bits, rug::float::Special::Infinity);
    let (value, levels, evaluations) = run_levels(f, ctx, MAX_LEVEL, |s, level| {
        let done = match &prev {
            Some(p) => {
                last_err = s.minus(p).magnitude();
                let scale = {
                    let m = s.magnitude();
                    if m > 1 {
                        m
                    } else {
                        Float::with_val(bits, 1)
                    }
                };
                level >= MIN_LEVEL && last_err <= Float::with_val(bits, &tol * &scale)
            }
            None => false,
        };
        prev = Some(s.clone());
        done
    })?;
    let converged = {
        let m = value.magnitude();
        let scale = if m > 1 { m } else { Float::with_val(bits, 1) };
        last_err <= Float::with_val(bits, &tol * &scale)
    };
    if !converged {
        return Err(Error::NonConvergence {
            what: "quadrature".into(),
            best: value.describe(),
            err_estimate: last_err.to_f64(),
        });
    }
    let err_estimate = if last_err > tol { last_err } else { tol };
    Ok(QuadResult {
        value,
        err_estimate,
        levels_used: levels,
        evaluations,
    })
}

/// Integrate a real integrand to `target_digits` (relative to `max(1, |I|)`).
pub fn integrate(
    f: &Integrand<Expr>,
    ctx: &PrecisionContext,
    target_digits: u32,
) -> Result<QuadResult<BigReal>> {
    integrate_generic(f, ctx, target_digits)
}

/// Integrate a complex integrand; real and imaginary parts share nodes.
pub fn integrate_complex(
    f: &Integrand<CExpr>,
    ctx: &PrecisionContext,
    target_digits: u32,
) -> Result<QuadResult<BigComplex>> {
    integrate_generic(f, ctx, target_digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(45).unwrap()
    }

    fn assert_close(v: &BigReal, expect: &BigReal, digits: u32, c: &PrecisionContext) {
        let d = Float::with_val(c.bits(), v - expect).abs();
        assert!(d < c.pow10_neg(digits), "got {v}, want {expect}, diff {d}");
    }

    #[test]
    fn polynomial() {
        let c = ctx();
        let r = integrate(&Integrand::new(Expr::x(), Interval::unit()), &c, 35).unwrap();
        assert_close(&r.value, &c.real(0.5), 35, &c);
        assert!(r.err_estimate >= c.pow10_neg(35));
        assert!(r.levels_used >= MIN_LEVEL);
        assert!(r.evaluations > 0);
    }

    #[test]
    fn log_endpoint_singularity() {
        let c = ctx();
        let r = integrate(&Integrand::new(Expr::x().ln(), Interval::unit()), &c, 35).unwrap();
        assert_close(&r.value, &c.real(-1), 35, &c);
    }

    #[test]
    fn ln_sin_over_quarter_period() {
        let c = ctx();
        let f = Integrand::new(Expr::x().sin().ln(), Interval::quarter_period());
        let r = integrate(&f, &c, 35).unwrap();
        let pi = crate::elementary::pi(&c);
        let expect = -(pi / 2u32) * c.real(2).ln();
        assert_close(&r.value, &expect, 35, &c);
    }

    #[test]
    fn semi_infinite() {
        let c = ctx();
        let body = Expr::int(1) / (Expr::int(1) + Expr::x().powi(2));
        let r = integrate(&Integrand::new(body, Interval::half_line()), &c, 35).unwrap();
        let expect = crate::elementary::pi(&c) / 2u32;
        assert_close(&r.value, &expect, 35, &c);
    }

    #[test]
    fn complex_degenerate() {
        let c = ctx();
        let f = Integrand::new(CExpr::Real(Expr::x()), Interval::unit());
        let r = integrate_complex(&f, &c, 35).unwrap();
        assert_close(&r.value.re, &c.real(0.5), 35, &c);
        assert!(r.value.im.is_zero());
    }

    #[test]
    fn precision_precondition() {
        let c = PrecisionContext::new(20).unwrap();
        let f = Integrand::new(Expr::x(), Interval::unit());
        assert!(matches!(integrate(&f, &c, 16), Err(Error::Precision(_))));
    }

    #[test]
    fn interior_nan_is_integrand_error() {
        let c = ctx();
        // ln(x - 1/2) is NaN on half the interval
        let f = Integrand::new((Expr::x() - Expr::rat(1, 2)).ln(), Interval::unit());
        assert!(matches!(
            integrate(&f, &c, 20),
            Err(Error::Integrand { .. })
        ));
    }

    #[test]
    fn reversed_interval_rejected() {
        let c = ctx();
        let f = Integrand::new(Expr::x(), Interval::finite(Expr::int(1), Expr::int(0)));
        assert!(matches!(integrate(&f, &c, 20), Err(Error::Domain { .. })));
    }

    #[test]
    fn level_sums_converge() {
        let c = ctx();
        let f = Integrand::new(Expr::x().ln().powi(2), Interval::unit());
        let sums = level_sums(&f, &c, 6).unwrap();
        assert_eq!(sums.len(), 7);
        let last = sums.last().unwrap();
        assert_close(last, &c.real(2), 40, &c);
    }
}

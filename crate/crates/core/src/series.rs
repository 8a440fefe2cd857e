//! Central-binomial harmonic series `Σ 4^k Π H_k^(m_i) / (k^n C(2k,k))`.
//!
//! Three evaluation paths: truncated partial sums with exact rational
//! terms, a Levin-type extrapolation of those partial sums, and the
//! integral representations over `[0, π/2]`.

use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::closed_form::{q, ClosedForm};
use crate::constants::ConstantAtom;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::integrands::{cot, ln_cos, ln_sin, moment, tan, x};
use crate::precision::{BigReal, PrecisionContext};
use crate::quad::{integrate, Integrand, Interval};

/// Exact `H_k^(m) = Σ_{j≤k} j^-m`.
pub fn harmonic(k: u64, m: u32) -> Rational {
    assert!(m >= 1, "harmonic order must be positive");
    crate::polygamma::harmonic_exact(k, m)
}

/// Exact `4^k / C(2k, k)`.
pub fn binom_ratio(k: u64) -> Rational {
    let c = Integer::from(Integer::binomial_u(2 * k as u32, k as u32));
    Rational::from((Integer::from(4u32).pow(k as u32), c))
}

/// Harmonic numbers of orders `1..=max_order` and `r_k = 4^k/C(2k,k)`,
/// advanced one `k` at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicState {
    k: u64,
    h: Vec<Rational>,
    r: Rational,
}

impl HarmonicState {
    /// State at `k = 0`. Orders up to 3 are always tracked.
    pub fn new(max_order: u32) -> Self {
        HarmonicState {
            k: 0,
            h: vec![Rational::new(); max_order.max(3) as usize],
            r: Rational::from(1),
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `H_k^(m)`
    pub fn h(&self, m: u32) -> &Rational {
        &self.h[m as usize - 1]
    }

    pub fn binom_ratio(&self) -> &Rational {
        &self.r
    }

    pub fn advance(&mut self) {
        self.k += 1;
        let k = Integer::from(self.k);
        for (i, h) in self.h.iter_mut().enumerate() {
            let p = Integer::from((&k).pow(i as u32 + 1));
            *h += Rational::from((1, p));
        }
        self.r *= Rational::from((2 * self.k, 2 * self.k - 1));
    }

    /// The `k`-th summand of `spec`.
    pub fn summand(&self, spec: &SeriesSpec) -> Rational {
        let mut t = self.r.clone();
        for &m in &spec.orders {
            t *= self.h(m);
        }
        let kn = Integer::from(self.k).pow(spec.exponent);
        t / kn
    }
}

/// Orders `m_1..m_j` (sorted) and the exponent `n` of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeriesSpec {
    pub orders: Vec<u32>,
    pub exponent: u32,
}

impl SeriesSpec {
    pub fn new(orders: &[u32], exponent: u32) -> Result<Self> {
        if orders.contains(&0) {
            return Err(Error::domain(
                "series",
                "harmonic orders must be at least 1",
            ));
        }
        if exponent == 0 {
            return Err(Error::domain("series", "exponent must be at least 1"));
        }
        let mut orders = orders.to_vec();
        orders.sort_unstable();
        Ok(SeriesSpec { orders, exponent })
    }

    pub fn weight(&self) -> u32 {
        self.orders.iter().sum::<u32>() + self.exponent
    }

    fn max_order(&self) -> u32 {
        self.orders.iter().copied().max().unwrap_or(1)
    }

    /// Number of `H_k` factors; each contributes a `ln k` to the tail.
    fn log_power(&self) -> usize {
        self.orders.iter().filter(|&&m| m == 1).count()
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Σ 4^k")?;
        for m in &self.orders {
            if *m == 1 {
                f.write_str("·H_k")?;
            } else {
                write!(f, "·H_k^({m})")?;
            }
        }
        write!(f, "/(k^{}·C(2k,k))", self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMethod {
    Partial,
    Levin,
    IntegralRep,
}

impl SumMethod {
    pub fn name(self) -> &'static str {
        match self {
            SumMethod::Partial => "partial",
            SumMethod::Levin => "levin",
            SumMethod::IntegralRep => "integral-rep",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SumResult {
    pub value: BigReal,
    pub terms_used: usize,
    pub method: SumMethod,
    pub err_estimate: BigReal,
}

/// `Σ_{k=1}^{N}` with exact terms. The error estimate is the first omitted
/// term, which badly understates the true tail.
pub fn partial_sum(spec: &SeriesSpec, n: usize, ctx: &PrecisionContext) -> Result<SumResult> {
    if n == 0 {
        return Err(Error::domain("partial_sum", "need at least one term"));
    }
    let bits = ctx.bits();
    let mut st = HarmonicState::new(spec.max_order());
    let mut sum = Float::new(bits + 16);
    for _ in 0..n {
        st.advance();
        sum += Float::with_val(bits + 16, &st.summand(spec));
    }
    st.advance();
    Ok(SumResult {
        value: Float::with_val(bits, sum),
        terms_used: n,
        method: SumMethod::Partial,
        err_estimate: Float::with_val(bits, &st.summand(spec)),
    })
}

const LEVIN_BETA: u32 = 1;
const LEVIN_MIN_TERMS: usize = 50;
const LEVIN_MAX_ORDER: usize = 16;

/// Extrapolated value of the full series.
///
/// The remainder is modelled as
/// `s_n - S ≈ (β+n) b_n Σ_{p=0}^{P} ln^p n Σ_{j<K} c_pj / (β+n)^j`,
/// with `b_n` the summand (no logs, `P = 0`: the classical u-transform) or
/// the log-free kernel `r_n/n^e` when `P` factors of `H_n` are present.
/// The unknowns come from a dense solve over consecutive `n`; the error
/// estimate is the change between orders `K` and `K-2`.
pub fn levin_sum(spec: &SeriesSpec, ctx: &PrecisionContext, max_terms: usize) -> Result<SumResult> {
    if max_terms < LEVIN_MIN_TERMS {
        return Err(Error::domain(
            "levin_sum",
            format!("need at least {LEVIN_MIN_TERMS} terms, got {max_terms}"),
        ));
    }
    let p = spec.log_power();
    let n0 = (max_terms / 3).clamp(5, 50);
    let order = ((max_terms - n0 - 1) / (p + 1)).min(LEVIN_MAX_ORDER);
    if order < 4 {
        return Err(Error::Acceleration(format!(
            "{max_terms} terms leave too few unknowns"
        )));
    }
    let work = ctx.elevated(150 + 10 * p as u32);
    let bits = work.bits();
    let needed = n0 + 1 + (p + 1) * order;

    let mut st = HarmonicState::new(spec.max_order());
    let mut partial = Vec::with_capacity(needed);
    let mut omega = Vec::with_capacity(needed);
    let mut acc = Float::new(bits);
    for _ in 0..needed {
        st.advance();
        let a = Float::with_val(bits, &st.summand(spec));
        acc += &a;
        partial.push(acc.clone());
        let b = if p == 0 {
            a
        } else {
            let kn = Integer::from(st.k()).pow(spec.exponent);
            Float::with_val(bits, st.binom_ratio()) / Float::with_val(bits, &kn)
        };
        omega.push(b * (st.k() + u64::from(LEVIN_BETA)));
    }

    let solve_order = |kk: usize| -> Result<BigReal> {
        let size = 1 + (p + 1) * kk;
        let mut rows = Vec::with_capacity(size);
        let mut rhs = Vec::with_capacity(size);
        for i in 0..size {
            let n = n0 + i;
            let idx = n - 1;
            let bn = Float::with_val(bits, n as u64 + u64::from(LEVIN_BETA));
            let inv = Float::with_val(bits, bn.recip_ref());
            let ln_n = Float::with_val(bits, n as u64).ln();
            let mut row = Vec::with_capacity(size);
            row.push(Float::with_val(bits, 1));
            let mut lp = Float::with_val(bits, 1);
            for _ in 0..=p {
                let mut w = Float::with_val(bits, &omega[idx] * &lp);
                for _ in 0..kk {
                    row.push(w.clone());
                    w *= &inv;
                }
                lp *= &ln_n;
            }
            rows.push(row);
            rhs.push(partial[idx].clone());
        }
        solve_first(rows, rhs)
            .ok_or_else(|| Error::Acceleration("singular extrapolation system".into()))
    };

    let hi = solve_order(order)?;
    let lo = solve_order(order - 2)?;
    let err = Float::with_val(bits, &hi - &lo).abs();
    let scale = Float::with_val(bits, hi.abs_ref()).max(&Float::with_val(bits, 1));
    if !hi.is_finite() || err > Float::with_val(bits, &scale * 1e-6) {
        return Err(Error::Acceleration(format!(
            "{spec}: fewer than 6 stable digits (change {:.3e})",
            err.to_f64()
        )));
    }
    let floor = ctx.epsilon();
    Ok(SumResult {
        value: Float::with_val(ctx.bits(), &hi),
        terms_used: needed,
        method: SumMethod::Levin,
        err_estimate: Float::with_val(ctx.bits(), err).max(&floor),
    })
}

/// First component of the solution of `A x = b` (partial pivoting).
fn solve_first(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Option<Float> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .clone()
                .abs()
                .partial_cmp(&a[j][col].clone().abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        let (btop, brest) = b.split_at_mut(col + 1);
        for (row, bi) in rest.iter_mut().zip(brest.iter_mut()) {
            if row[col].is_zero() {
                continue;
            }
            let f = Float::with_val(prow[col].prec(), &row[col] / &prow[col]);
            for c in col..n {
                let d = Float::with_val(f.prec(), &f * &prow[c]);
                row[c] -= d;
            }
            *bi -= Float::with_val(f.prec(), &f * &btop[col]);
        }
    }
    let mut xs = vec![Float::new(b[0].prec()); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            s -= Float::with_val(s.prec(), &a[i][j] * &xs[j]);
        }
        xs[i] = s / &a[i][i];
    }
    Some(xs.swap_remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenFunc {
    /// `½ Σ 4^k x^(2k-1)/(k C(2k,k))`
    ArcsinOverSqrt,
    /// `½ Σ 4^k x^(2k)/(k² C(2k,k))`
    ArcsinSquared,
    /// `3/2 Σ 4^k H_k^(2) x^(2k)/(k² C) - 3/2 Σ 4^k x^(2k)/(k⁴ C)`
    ArcsinFourth,
}

/// Truncated generating-function value for `|x| < 1`.
pub fn gen_func(which: GenFunc, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits() + 16;
    let x = Float::with_val(bits, x);
    if !x.is_finite() || Float::with_val(bits, x.abs_ref()) >= 1 {
        return Err(Error::domain("gen_func", "need |x| < 1"));
    }
    if x.is_zero() {
        return Ok(ctx.zero());
    }
    let x2 = Float::with_val(bits, x.square_ref());
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8));
    let mut st = HarmonicState::new(2);
    let mut pw = Float::with_val(bits, 1); // x^(2k)
    let mut sum = Float::new(bits);
    let mut prev_mag: Option<Float> = None;
    loop {
        st.advance();
        pw *= &x2;
        let k = Integer::from(st.k());
        let coeff = match which {
            GenFunc::ArcsinOverSqrt => Rational::from(st.binom_ratio() / &k) / 2u32,
            GenFunc::ArcsinSquared => {
                Rational::from(st.binom_ratio() / Integer::from(k.square_ref())) / 2u32
            }
            GenFunc::ArcsinFourth => {
                let k2 = Integer::from(k.square_ref());
                let k4 = Integer::from(k2.square_ref());
                let a = Rational::from(st.binom_ratio() * st.h(2)) / &k2;
                let b = Rational::from(st.binom_ratio() / &k4);
                (a - b) * Rational::from((3, 2))
            }
        };
        let term = Float::with_val(bits, &coeff) * &pw;
        let mag = Float::with_val(bits, term.abs_ref());
        sum += term;
        // the tail is geometric once terms decrease
        let decreasing = prev_mag.as_ref().is_some_and(|p| mag < *p);
        if decreasing
            && mag
                < Float::with_val(
                    bits,
                    &tol * Float::with_val(bits, sum.abs_ref()).max(&Float::with_val(bits, 1)),
                )
        {
            break;
        }
        prev_mag = Some(mag);
    }
    if which == GenFunc::ArcsinOverSqrt {
        sum /= &x;
    }
    Ok(Float::with_val(ctx.bits(), sum))
}

/// `series = offset + Σ coeff·∫₀^{π/2} f`, after resolving any
/// dependence on other tabled series.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralRep {
    pub offset: ClosedForm,
    pub terms: Vec<(ClosedForm, Expr)>,
}

impl IntegralRep {
    fn add_scaled(&mut self, other: &IntegralRep, c: &ClosedForm) {
        self.offset = &self.offset + &(c * &other.offset);
        for (k, f) in &other.terms {
            self.push(c * k, f.clone());
        }
    }

    fn push(&mut self, c: ClosedForm, f: Expr) {
        if let Some(slot) = self.terms.iter_mut().find(|(_, g)| *g == f) {
            slot.0 = &slot.0 + &c;
        } else {
            self.terms.push((c, f));
        }
        self.terms.retain(|(c, _)| !c.is_zero());
    }

    pub fn integrands(&self) -> impl Iterator<Item = Integrand<Expr>> + '_ {
        self.terms
            .iter()
            .map(|(_, f)| Integrand::new(f.clone(), Interval::quarter_period()))
    }
}

fn cf(n: i64, d: i64) -> ClosedForm {
    ClosedForm::rational(q(n, d))
}

/// Table row: offset, direct integral terms, and other-series terms.
type Row = (
    ClosedForm,
    Vec<(ClosedForm, Expr)>,
    Vec<(ClosedForm, SeriesSpec)>,
);

fn spec(orders: &[u32], n: u32) -> SeriesSpec {
    SeriesSpec::new(orders, n).expect("valid table spec")
}

fn table_row(s: &SeriesSpec) -> Option<Row> {
    use ConstantAtom::{Pi, Zeta2, Zeta3};
    let z2 = ClosedForm::atom(Zeta2);
    let z3 = ClosedForm::atom(Zeta3);
    let zero = ClosedForm::zero();
    let row = match (s.orders.as_slice(), s.exponent) {
        ([], 2) => (zero, vec![(cf(4, 1), x())], vec![]),
        ([], 3) => (zero, vec![(cf(-8, 1), moment(1, 1, 0))], vec![]),
        ([1], 2) => (zero, vec![(cf(-8, 1), moment(1, 0, 1))], vec![]),
        ([], 5) => (zero, vec![(cf(-16, 3), moment(1, 3, 0))], vec![]),
        ([3], 2) => (
            ClosedForm::term(3, &[Zeta2, Zeta3]),
            vec![(cf(-8, 1), x().powi(2) * tan() * ln_sin().powi(2))],
            vec![],
        ),
        ([2], 3) => (
            zero,
            vec![(cf(-16, 3), moment(3, 1, 0)), (cf(-16, 3), moment(1, 3, 0))],
            vec![],
        ),
        ([1, 1], 3) => (
            zero,
            vec![(cf(16, 1), x().powi(2) * cot() * ln_cos().powi(2))],
            vec![(cf(-1, 1), spec(&[2], 3))],
        ),
        ([1], 4) => (
            zero,
            vec![(cf(-16, 1), moment(1, 2, 1))],
            vec![
                (cf(-1, 1), spec(&[2], 3)),
                (cf(-1, 1), spec(&[3], 2)),
                (z2, spec(&[], 3)),
                (z3, spec(&[], 2)),
            ],
        ),
        ([1, 2], 2) => (
            zero,
            vec![(cf(-16, 1), moment(1, 1, 2))],
            vec![
                (cf(-1, 2), spec(&[1, 1], 3)),
                (cf(-1, 2), spec(&[2], 3)),
                (cf(-1, 1), spec(&[3], 2)),
                (z2, spec(&[1], 2)),
                (z3, spec(&[], 2)),
            ],
        ),
        ([1, 1, 1], 2) => (
            zero,
            vec![
                (cf(32, 1), moment(1, 3, 0)),
                (ClosedForm::term(-16, &[Pi]), moment(0, 3, 0)),
            ],
            vec![(cf(-3, 1), spec(&[1, 2], 2)), (cf(-2, 1), spec(&[3], 2))],
        ),
        _ => return None,
    };
    Some(row)
}

/// The integral representation of a tabled series.
pub fn integral_representation(s: &SeriesSpec) -> Result<IntegralRep> {
    let (offset, direct, deps) = table_row(s)
        .ok_or_else(|| Error::Unsupported(format!("no integral representation for {s}")))?;
    let mut rep = IntegralRep {
        offset,
        terms: Vec::new(),
    };
    for (c, f) in direct {
        rep.push(c, f);
    }
    for (c, dep) in deps {
        let inner = integral_representation(&dep)?;
        rep.add_scaled(&inner, &c);
    }
    Ok(rep)
}

/// Value of a tabled series through its integral representation.
pub fn integral_sum(
    s: &SeriesSpec,
    ctx: &PrecisionContext,
    target_digits: u32,
) -> Result<SumResult> {
    let rep = integral_representation(s)?;
    let bits = ctx.bits();
    let mut value = rep.offset.eval(ctx);
    let mut err = Float::new(bits);
    let mut evaluations = 0;
    for ((c, _), f) in rep.terms.iter().zip(rep.integrands()) {
        let r = integrate(&f, ctx, target_digits)?;
        let cv = c.eval(ctx);
        err += Float::with_val(bits, &r.err_estimate * &cv).abs();
        value += Float::with_val(bits, &r.value * &cv);
        evaluations += r.evaluations;
    }
    Ok(SumResult {
        value,
        terms_used: evaluations,
        method: SumMethod::IntegralRep,
        err_estimate: err,
    })
}

/// Specs with an integral representation.
pub fn tabled_specs() -> Vec<SeriesSpec> {
    [
        (&[][..], 2),
        (&[], 3),
        (&[1], 2),
        (&[], 5),
        (&[3], 2),
        (&[2], 3),
        (&[1, 1], 3),
        (&[1], 4),
        (&[1, 2], 2),
        (&[1, 1, 1], 2),
    ]
    .iter()
    .map(|(o, n)| spec(o, *n))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(5, 1), q(137, 60));
        assert_eq!(harmonic(3, 2), q(49, 36));
        assert_eq!(harmonic(0, 3), q(0, 1));
    }

    #[test]
    fn binom_ratio_examples() {
        assert_eq!(binom_ratio(1), q(2, 1));
        assert_eq!(binom_ratio(3), q(16, 5));
        assert_eq!(binom_ratio(0), q(1, 1));
    }

    #[test]
    fn state_matches_scratch() {
        let mut st = HarmonicState::new(3);
        for _ in 0..40 {
            st.advance();
        }
        assert_eq!(st.h(1), &harmonic(40, 1));
        assert_eq!(st.h(3), &harmonic(40, 3));
        assert_eq!(st.binom_ratio(), &binom_ratio(40));
    }

    #[test]
    fn partial_sum_examples() {
        let c = ctx();
        let r = partial_sum(&spec(&[], 2), 1, &c).unwrap();
        assert_eq!(r.value, 2);
        let r = partial_sum(&spec(&[3], 2), 2, &c).unwrap();
        assert_eq!(r.value, 2.75);
        assert_eq!(r.method, SumMethod::Partial);
        assert!(partial_sum(&spec(&[], 2), 0, &c).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(SeriesSpec::new(&[0], 2).is_err());
        assert!(SeriesSpec::new(&[1], 0).is_err());
        let s = SeriesSpec::new(&[2, 1], 2).unwrap();
        assert_eq!(s.orders, vec![1, 2]);
        assert_eq!(s.weight(), 5);
    }

    #[test]
    fn gen_func_examples() {
        let c = ctx();
        let half = c.real(0.5);
        let pi = crate::elementary::pi(&c);
        let v = gen_func(GenFunc::ArcsinSquared, &half, &c).unwrap();
        let expect = Float::with_val(c.bits(), pi.square_ref()) / 36u32;
        assert!((v - expect).abs() < c.pow10_neg(38));
        let v = gen_func(GenFunc::ArcsinOverSqrt, &half, &c).unwrap();
        let expect = pi.clone() / (c.real(3) * c.real(3).sqrt());
        assert!((v - expect).abs() < c.pow10_neg(38));
        let v = gen_func(GenFunc::ArcsinFourth, &half, &c).unwrap();
        let expect = pi.pow(4u32) / 1296u32;
        assert!((v - expect).abs() < c.pow10_neg(38));
        assert!(gen_func(GenFunc::ArcsinSquared, &c.real(1), &c).is_err());
    }

    #[test]
    fn representation_shapes() {
        let r = integral_representation(&spec(&[], 5)).unwrap();
        assert!(r.offset.is_zero());
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.terms[0].0, cf(-16, 3));

        let r = integral_representation(&spec(&[3], 2)).unwrap();
        assert_eq!(
            r.offset,
            ClosedForm::term(3, &[ConstantAtom::Zeta2, ConstantAtom::Zeta3])
        );

        // ([1,1],3) = 16∫x²cot ln²cos + 16/3∫x³ ln sin + 16/3∫x ln³ sin
        let r = integral_representation(&spec(&[1, 1], 3)).unwrap();
        assert_eq!(r.terms.len(), 3);
        assert!(integral_representation(&spec(&[4], 1)).is_err());
    }

    #[test]
    fn small_series_by_integral() {
        let c = ctx();
        let z2 = crate::constants::constant(ConstantAtom::Zeta2, &c);
        let r = integral_sum(&spec(&[], 2), &c, 30).unwrap();
        assert!((r.value - z2 * 3u32).abs() < c.pow10_neg(30));
    }

    #[test]
    fn levin_small_series() {
        let c = ctx();
        let z2 = crate::constants::constant(ConstantAtom::Zeta2, &c);
        let r = levin_sum(&spec(&[], 2), &c, 120).unwrap();
        assert!(
            (r.value.clone() - z2 * 3u32).abs() < c.pow10_neg(8),
            "{}",
            r.value
        );
        assert!(levin_sum(&spec(&[], 2), &c, 20).is_err());
    }

    #[test]
    fn solver() {
        // 2x + y = 5, x - y = 1 -> x = 2
        let f = |v: f64| Float::with_val(64, v);
        let a = vec![vec![f(2.0), f(1.0)], vec![f(1.0), f(-1.0)]];
        let x = solve_first(a, vec![f(5.0), f(1.0)]).unwrap();
        assert!((x - 2.0f64).abs() < 1e-15);
    }
}

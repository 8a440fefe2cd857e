//! PSLQ integer-relation search and recovery of the `T.*` closed forms.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::constants::{constant, ConstantAtom};
use crate::error::{Error, Result};
use crate::identities::{main_coefficients, main_series};
use crate::precision::{BigReal, PrecisionContext};
use crate::series::integral_sum;

#[derive(Debug, Clone)]
pub struct RelationProblem {
    pub values: Vec<BigReal>,
    pub max_coeff_digits: u32,
    pub precision_digits: u32,
}

impl RelationProblem {
    pub fn new(values: Vec<BigReal>, max_coeff_digits: u32, precision_digits: u32) -> Result<Self> {
        let p = RelationProblem {
            values,
            max_coeff_digits,
            precision_digits,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.values.len() as u32;
        if n < 2 {
            return Err(Error::domain("pslq", "need at least two values"));
        }
        if self.values.iter().any(|v| !v.is_finite() || v.is_zero()) {
            return Err(Error::domain("pslq", "values must be finite and nonzero"));
        }
        if self.precision_digits < n * self.max_coeff_digits + 20 {
            return Err(Error::Precision(format!(
                "{n} values with {}-digit coefficients need at least {} digits",
                self.max_coeff_digits,
                n * self.max_coeff_digits + 20
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub coeffs: Vec<Integer>,
    pub residual: BigReal,
}

impl Relation {
    /// `|Σ cᵢ xᵢ|` at the precision of the given values.
    pub fn residual_for(&self, values: &[BigReal]) -> BigReal {
        let bits = values.iter().map(Float::prec).max().unwrap_or(64);
        let mut s = Float::new(bits);
        for (c, v) in self.coeffs.iter().zip(values) {
            s += Float::with_val(bits, v * c);
        }
        s.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PslqOutcome {
    Found(Relation),
    /// No relation with coefficients up to `10^max_coeff_digits`; any
    /// relation has Euclidean norm at least `bound`.
    None {
        bound: BigReal,
    },
}

impl PslqOutcome {
    pub fn relation(&self) -> Option<&Relation> {
        match self {
            PslqOutcome::Found(r) => Some(r),
            PslqOutcome::None { .. } => None,
        }
    }
}

fn nint(x: &Float) -> Integer {
    x.to_integer_round(Round::Nearest)
        .map(|(i, _)| i)
        .unwrap_or_default()
}

fn normalize(mut c: Vec<Integer>) -> Vec<Integer> {
    let g = c.iter().fold(Integer::new(), |g, x| g.gcd(x));
    if g > 1 {
        for x in &mut c {
            *x = Integer::from(x.div_exact_ref(&g));
        }
    }
    if c.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
        for x in &mut c {
            *x = -Integer::from(&*x);
        }
    }
    c
}

/// Single-level PSLQ with `γ = √(4/3)`.
pub fn pslq(p: &RelationProblem) -> Result<PslqOutcome> {
    p.validate()?;
    let n = p.values.len();
    let prec = p.precision_digits;
    let bits = crate::precision::bits_for_digits(prec + 10);
    let f = |v: f64| Float::with_val(bits, v);
    let pow10 = |e: i32| {
        let t = Float::with_val(bits, Float::u_pow_u(10, e.unsigned_abs()));
        if e < 0 {
            t.recip()
        } else {
            t
        }
    };
    let threshold = pow10(-(prec as i32) + 15);
    let max_norm = pow10(p.max_coeff_digits as i32) * f(n as f64).sqrt();
    let gamma = f(4.0 / 3.0).sqrt();
    let x: Vec<Float> = p.values.iter().map(|v| Float::with_val(bits, v)).collect();

    // s_k = sqrt(Σ_{j≥k} x_j²)
    let mut s = vec![f(0.0); n];
    let mut acc = f(0.0);
    for k in (0..n).rev() {
        acc += Float::with_val(bits, x[k].square_ref());
        s[k] = Float::with_val(bits, acc.sqrt_ref());
    }
    let t = s[0].clone();
    let mut y: Vec<Float> = x.iter().map(|v| Float::with_val(bits, v / &t)).collect();
    for v in &mut s {
        *v /= &t;
    }
    let mut h = vec![vec![f(0.0); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            h[i][j] = if i == j {
                Float::with_val(bits, &s[j + 1] / &s[j])
            } else {
                let d = Float::with_val(bits, &s[j] * &s[j + 1]);
                -Float::with_val(bits, &y[i] * &y[j]) / d
            };
        }
    }
    let ident = || -> Vec<Vec<Integer>> {
        (0..n)
            .map(|i| (0..n).map(|j| Integer::from((i == j) as u32)).collect())
            .collect()
    };
    let mut a = ident();
    let mut b = ident();

    let reduce = |i: usize,
                  j: usize,
                  h: &mut Vec<Vec<Float>>,
                  y: &mut Vec<Float>,
                  a: &mut Vec<Vec<Integer>>,
                  b: &mut Vec<Vec<Integer>>| {
        if h[j][j].is_zero() {
            return;
        }
        let t = nint(&Float::with_val(bits, &h[i][j] / &h[j][j]));
        if t == 0 {
            return;
        }
        let yi = Float::with_val(bits, &y[i] * &t);
        y[j] += yi;
        let (upper, lower) = h.split_at_mut(i);
        for (hik, hjk) in lower[0].iter_mut().zip(&upper[j]).take(j + 1) {
            *hik -= Float::with_val(bits, hjk * &t);
        }
        for k in 0..n {
            let d = Integer::from(&a[j][k] * &t);
            a[i][k] -= d;
            let d = Integer::from(&b[k][i] * &t);
            b[k][j] += d;
        }
    };

    for i in 1..n {
        for j in (0..i).rev() {
            reduce(i, j, &mut h, &mut y, &mut a, &mut b);
        }
    }

    let coeff_limit = Integer::from(Integer::u_pow_u(10, prec.saturating_sub(5)));
    let cap = 10 * n as u64 * u64::from(prec);
    let mut bound = f(0.0);
    for _ in 0..cap {
        // detection
        let (jmin, ymin) = y
            .iter()
            .enumerate()
            .map(|(j, v)| (j, Float::with_val(bits, v.abs_ref())))
            .min_by(|l, r| l.1.partial_cmp(&r.1).expect("finite"))
            .expect("n ≥ 2");
        if ymin < threshold {
            let coeffs = normalize((0..n).map(|k| b[k][jmin].clone()).collect());
            let rel = Relation {
                residual: f(0.0),
                coeffs,
            };
            let residual = rel.residual_for(&p.values);
            return Ok(PslqOutcome::Found(Relation { residual, ..rel }));
        }
        let hmax = h
            .iter()
            .enumerate()
            .take(n - 1)
            .map(|(j, row)| Float::with_val(bits, row[j].abs_ref()))
            .fold(f(0.0), |m, v| if v > m { v } else { m });
        if hmax.is_zero() {
            break;
        }
        bound = hmax.recip();
        if bound > max_norm {
            return Ok(PslqOutcome::None { bound });
        }
        if a.iter().flatten().any(|v| v.cmp_abs(&coeff_limit).is_gt()) {
            return Err(Error::NeedsMoreDigits(format!(
                "pslq exhausted {prec} digits without a relation"
            )));
        }

        // exchange
        let mut m = 0;
        let mut best = f(-1.0);
        let mut g = gamma.clone();
        for (i, row) in h.iter().enumerate().take(n - 1) {
            let v = Float::with_val(bits, row[i].abs_ref()) * &g;
            if v > best {
                best = v;
                m = i;
            }
            g *= &gamma;
        }
        y.swap(m, m + 1);
        a.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = Float::with_val(bits, h[m][m].hypot_ref(&h[m][m + 1]));
            let t1 = Float::with_val(bits, &h[m][m] / &t0);
            let t2 = Float::with_val(bits, &h[m][m + 1] / &t0);
            for row in h.iter_mut().skip(m) {
                let (t3, t4) = (row[m].clone(), row[m + 1].clone());
                row[m] = Float::with_val(bits, &t1 * &t3) + Float::with_val(bits, &t2 * &t4);
                row[m + 1] = Float::with_val(bits, &t1 * &t4) - Float::with_val(bits, &t2 * &t3);
            }
        }
        for i in m + 1..n {
            for j in (0..(i).min(m + 2)).rev() {
                reduce(i, j, &mut h, &mut y, &mut a, &mut b);
            }
        }
    }
    if bound > max_norm || bound.is_zero() {
        return Ok(PslqOutcome::None { bound });
    }
    Err(Error::NeedsMoreDigits(format!(
        "pslq reached its iteration cap at {prec} digits"
    )))
}

/// Weight-5 basis in fixed order:
/// `ζ(5), ζ(2)ζ(3), Li₅(½), ln2·ζ(4), ln³2·ζ(2), ln⁵2`.
pub fn weight5_basis(ctx: &PrecisionContext) -> Vec<BigReal> {
    use ConstantAtom::*;
    let c = |a| constant(a, ctx);
    let ln2 = c(Ln2);
    let ln2_3 = Float::with_val(ctx.bits(), (&ln2).pow(3u32));
    vec![
        c(Zeta5),
        c(Zeta2) * c(Zeta3),
        c(Li5Half),
        ln2.clone() * c(Zeta4),
        ln2_3 * c(Zeta2),
        Float::with_val(ctx.bits(), (&ln2).pow(5u32)),
    ]
}

pub const BASIS_LABELS: [&str; 6] = [
    "ζ(5)",
    "ζ(2)ζ(3)",
    "Li₅(½)",
    "ln2·ζ(4)",
    "ln³2·ζ(2)",
    "ln⁵2",
];

/// Denominator-cleared `T.*` relation on `(S, basis...)`.
pub fn expected_relation(n: usize) -> Vec<Integer> {
    let c = main_coefficients(n);
    let lcd = c
        .iter()
        .fold(Integer::from(1), |l, &(_, d)| l.lcm(&Integer::from(d)));
    let mut v = vec![lcd.clone()];
    for (num, den) in c {
        v.push(-Integer::from(&lcd * num).div_exact(&Integer::from(den)));
    }
    normalize(v)
}

#[derive(Debug, Clone)]
pub struct Rediscovery {
    pub id: String,
    pub relation: Option<Relation>,
    pub expected: Vec<Integer>,
    pub matched: bool,
    pub max_coeff_digits: u32,
}

/// Largest coefficient size PSLQ may search at `digits` over seven values.
pub fn coeff_digits_for(digits: u32) -> u32 {
    ((digits.saturating_sub(20)) / 7).clamp(1, 8)
}

/// Recover the closed form of `T.i`..`T.vi` from its numeric value at
/// `ctx.digits()`.
pub fn rediscover(series_id: &str, ctx: &PrecisionContext) -> Result<Rediscovery> {
    const IDS: [&str; 6] = ["T.i", "T.ii", "T.iii", "T.iv", "T.v", "T.vi"];
    let n = IDS
        .iter()
        .position(|s| *s == series_id)
        .ok_or_else(|| Error::UnknownIdentity(series_id.to_string()))?
        + 1;
    let digits = ctx.digits();
    let work = ctx.elevated(10);
    let s = integral_sum(&main_series(n), &work, digits + 2)?.value;
    let bits = ctx.bits();
    let mut values = vec![Float::with_val(bits, &s)];
    values.extend(
        weight5_basis(&work)
            .into_iter()
            .map(|v| Float::with_val(bits, v)),
    );
    let max_coeff_digits = coeff_digits_for(digits);
    let problem = RelationProblem::new(values, max_coeff_digits, digits)?;
    let expected = expected_relation(n);
    let relation = pslq(&problem)?.relation().cloned();
    let matched = relation.as_ref().is_some_and(|r| r.coeffs == expected);
    Ok(Rediscovery {
        id: series_id.to_string(),
        relation,
        expected,
        matched,
        max_coeff_digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn trivial_relations() {
        let ctx = PrecisionContext::new(40).unwrap();
        let pi = crate::elementary::pi(&ctx);
        let z2 = constant(ConstantAtom::Zeta2, &ctx);
        let ln2 = constant(ConstantAtom::Ln2, &ctx);
        let cases = [
            (vec![ctx.real(2.5), ctx.real(1)], ints(&[2, -5])),
            (vec![pi.square(), z2], ints(&[1, -6])),
            (vec![ln2.clone() * 2u32, ln2], ints(&[1, -2])),
        ];
        for (values, expect) in cases {
            let p = RelationProblem::new(values, 4, 40).unwrap();
            let r = pslq(&p).unwrap();
            let r = r.relation().expect("relation");
            assert_eq!(r.coeffs, expect);
            assert!(r.residual < ctx.pow10_neg(30));
        }
    }

    #[test]
    fn negative_control() {
        let ctx = PrecisionContext::new(60).unwrap();
        let values = vec![
            ctx.real(1),
            crate::elementary::pi(&ctx),
            constant(ConstantAtom::Ln2, &ctx),
        ];
        let p = RelationProblem::new(values, 6, 60).unwrap();
        match pslq(&p).unwrap() {
            PslqOutcome::None { bound } => assert!(bound > 1e6),
            PslqOutcome::Found(r) => panic!("spurious {:?}", r.coeffs),
        }
    }

    #[test]
    fn expected_vectors() {
        assert_eq!(
            expected_relation(1),
            ints(&[120, -3255, 540, 1920, 1140, -320, -16])
        );
        assert_eq!(expected_relation(2)[0], 60);
        assert_eq!(expected_relation(3)[0], 10);
    }

    #[test]
    fn problem_preconditions() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(RelationProblem::new(vec![ctx.real(1), ctx.real(0)], 2, 30).is_err());
        assert!(matches!(
            RelationProblem::new(vec![ctx.real(1), ctx.real(2)], 10, 30),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn rediscover_first() {
        let ctx = PrecisionContext::new(60).unwrap();
        let r = rediscover("T.i", &ctx).unwrap();
        assert!(r.matched, "{:?}", r.relation);
    }
}

//! Exact linear combinations of constant monomials with rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::constants::{constant, ConstantAtom};
use crate::precision::{BigReal, PrecisionContext};

/// `Rational` from a numerator/denominator pair.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}

/// Product of constant atoms with positive integer exponents, canonically ordered.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(BTreeMap<ConstantAtom, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    /// Product of the listed atoms; repeats raise the exponent.
    pub fn from_atoms(atoms: &[ConstantAtom]) -> Self {
        let mut m = BTreeMap::new();
        for &a in atoms {
            *m.entry(a).or_insert(0) += 1;
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|(a, e)| a.weight() * e).sum()
    }

    pub fn factors(&self) -> impl Iterator<Item = (ConstantAtom, u32)> + '_ {
        self.0.iter().map(|(a, e)| (*a, *e))
    }

    pub fn eval(&self, ctx: &PrecisionContext) -> BigReal {
        let mut acc = ctx.real(1);
        for (atom, e) in self.factors() {
            acc *= constant(atom, ctx).pow(e);
        }
        acc
    }
}

impl Mul for &Monomial {
    type Output = Monomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Monomial) -> Monomial {
        let mut m = self.0.clone();
        for (a, e) in &rhs.0 {
            *m.entry(*a).or_insert(0) += e;
        }
        Monomial(m)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (a, e) in self.factors() {
            if !first {
                f.write_str("·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `Σ coeff · monomial`, with unique monomials and no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedForm {
    terms: BTreeMap<Monomial, Rational>,
}

impl ClosedForm {
    pub fn zero() -> Self {
        ClosedForm::default()
    }

    pub fn rational(c: impl Into<Rational>) -> Self {
        let mut cf = ClosedForm::zero();
        cf.add_term(c.into(), Monomial::one());
        cf
    }

    pub fn atom(a: ConstantAtom) -> Self {
        Self::term(Rational::from(1), &[a])
    }

    pub fn term(c: impl Into<Rational>, atoms: &[ConstantAtom]) -> Self {
        let mut cf = ClosedForm::zero();
        cf.add_term(c.into(), Monomial::from_atoms(atoms));
        cf
    }

    /// Build from `((num, den), atoms)` rows.
    pub fn from_terms(rows: &[((i64, i64), &[ConstantAtom])]) -> Self {
        let mut cf = ClosedForm::zero();
        for ((n, d), atoms) in rows {
            cf.add_term(q(*n, *d), Monomial::from_atoms(atoms));
        }
        cf
    }

    pub fn add_term(&mut self, c: Rational, m: Monomial) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn weights(&self) -> BTreeSet<u32> {
        self.terms.keys().map(Monomial::weight).collect()
    }

    /// The common weight of every monomial, if there is exactly one.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let w = self.weights();
        (w.len() == 1).then(|| *w.iter().next().unwrap())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = ClosedForm::zero();
        for (m, k) in &self.terms {
            out.add_term(Rational::from(k * c), m.clone());
        }
        out
    }

    pub fn eval(&self, ctx: &PrecisionContext) -> BigReal {
        let inner = ctx.elevated(4);
        let mut acc = inner.zero();
        for (m, c) in &self.terms {
            let v = m.eval(&inner);
            acc += Float::with_val(inner.bits(), c) * v;
        }
        Float::with_val(ctx.bits(), acc)
    }
}

impl Add for &ClosedForm {
    type Output = ClosedForm;
    fn add(self, rhs: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(c.clone(), m.clone());
        }
        out
    }
}

impl Sub for &ClosedForm {
    type Output = ClosedForm;
    fn sub(self, rhs: &ClosedForm) -> ClosedForm {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(Rational::from(-c), m.clone());
        }
        out
    }
}

impl Mul for &ClosedForm {
    type Output = ClosedForm;
    fn mul(self, rhs: &ClosedForm) -> ClosedForm {
        let mut out = ClosedForm::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(Rational::from(ca * cb), ma * mb);
            }
        }
        out
    }
}

impl Neg for &ClosedForm {
    type Output = ClosedForm;
    fn neg(self) -> ClosedForm {
        self.scale(&Rational::from(-1))
    }
}

impl Add for ClosedForm {
    type Output = ClosedForm;
    fn add(self, rhs: ClosedForm) -> ClosedForm {
        &self + &rhs
    }
}

impl Sub for ClosedForm {
    type Output = ClosedForm;
    fn sub(self, rhs: ClosedForm) -> ClosedForm {
        &self - &rhs
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = *c < 0;
            let abs = Rational::from(c.abs_ref());
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}·{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ConstantAtom::*;

    #[test]
    fn canonical_and_zero_free() {
        let a = ClosedForm::from_terms(&[((1, 2), &[Zeta3, Ln2]), ((1, 2), &[Ln2, Zeta3])]);
        assert_eq!(a.len(), 1);
        assert_eq!(a.coefficient(&Monomial::from_atoms(&[Ln2, Zeta3])), q(1, 1));
        let z = &a - &a;
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn weights() {
        let t = ClosedForm::from_terms(&[
            ((217, 8), &[Zeta5]),
            ((-9, 2), &[Zeta2, Zeta3]),
            ((-16, 1), &[Li5Half]),
            ((-19, 2), &[Ln2, Zeta4]),
            ((8, 3), &[Ln2, Ln2, Ln2, Zeta2]),
            ((2, 15), &[Ln2, Ln2, Ln2, Ln2, Ln2]),
        ]);
        assert_eq!(t.homogeneous_weight(), Some(5));
        let mixed = &t + &ClosedForm::rational(1);
        assert_eq!(mixed.homogeneous_weight(), None);
    }

    #[test]
    fn product_distributes() {
        let z2 = ClosedForm::atom(Zeta2);
        let s = ClosedForm::from_terms(&[((-7, 2), &[Zeta3]), ((6, 1), &[Ln2, Zeta2])]);
        let p = &z2 * &s;
        assert_eq!(
            p.coefficient(&Monomial::from_atoms(&[Zeta2, Zeta3])),
            q(-7, 2)
        );
        assert_eq!(
            p.coefficient(&Monomial::from_atoms(&[Ln2, Zeta2, Zeta2])),
            q(6, 1)
        );
        assert_eq!(p.homogeneous_weight(), Some(5));
    }

    #[test]
    fn evaluates_examples() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(ClosedForm::zero().eval(&ctx).is_zero());
        let three_z2 = ClosedForm::term(3, &[Zeta2]).eval(&ctx);
        assert!((three_z2.to_f64() - 4.934_802_200_5).abs() < 1e-9);

        // 7/16 ζ(3) - 3/4 ln2 ζ(2)
        let l3 = ClosedForm::from_terms(&[((7, 16), &[Zeta3]), ((-3, 4), &[Ln2, Zeta2])]);
        let direct = 7.0 / 16.0 * 1.202_056_903_159_594
            - 0.75 * std::f64::consts::LN_2 * 1.644_934_066_848_226;
        assert!((l3.eval(&ctx).to_f64() - direct).abs() < 1e-14);
    }

    #[test]
    fn display() {
        let f =
            ClosedForm::from_terms(&[((-7, 2), &[Zeta3]), ((6, 1), &[Ln2, Zeta2]), ((1, 1), &[])]);
        assert_eq!(f.to_string(), "1 + 6·ln2·ζ(2) - 7/2·ζ(3)");
    }
}

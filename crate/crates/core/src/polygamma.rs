//! Polygamma values at the handful of arguments the identities need.

use rug::ops::Pow;
use rug::Rational;

use crate::closed_form::{ClosedForm, Monomial};
use crate::constants::ConstantAtom;
use crate::error::{Error, Result};
use crate::precision::{BigReal, PrecisionContext};

/// Exact `H_k^(m)`.
pub(crate) fn harmonic_exact(k: u64, m: u32) -> Rational {
    let mut h = Rational::new();
    for j in 1..=k {
        let d = rug::Integer::from(j).pow(m);
        h += Rational::from((1, d));
    }
    h
}

/// `ψ^(m)(z)` as a closed form, for `m ∈ {0, 1, 2}` and
/// `z ∈ {1/2, 1, k+1}`.
pub fn polygamma_closed_form(m: u32, z: &Rational) -> Result<ClosedForm> {
    let unsupported = || Error::UnsupportedPoint(format!("polygamma order {m} at {z}"));
    if m > 2 {
        return Err(unsupported());
    }
    let half = Rational::from((1, 2));
    if *z == half {
        return Ok(match m {
            0 => ClosedForm::from_terms(&[
                ((-1, 1), &[ConstantAtom::EulerGamma]),
                ((-2, 1), &[ConstantAtom::Ln2]),
            ]),
            1 => ClosedForm::term(3, &[ConstantAtom::Zeta2]),
            _ => ClosedForm::term(-14, &[ConstantAtom::Zeta3]),
        });
    }
    if *z.denom() != 1 || *z < 1 {
        return Err(unsupported());
    }
    let k = z.numer().to_u64().ok_or_else(unsupported)? - 1;
    let h = harmonic_exact(k, m + 1);
    let mut cf = ClosedForm::zero();
    match m {
        0 => {
            cf.add_term(
                Rational::from(-1),
                Monomial::from_atoms(&[ConstantAtom::EulerGamma]),
            );
            cf.add_term(h, Monomial::one());
        }
        _ => {
            // (-1)^(m+1) m! (ζ(m+1) - H_k^(m+1))
            let sign_fact = if m == 1 { 1 } else { -2 };
            let zeta = ConstantAtom::zeta(m + 1).expect("order checked");
            cf.add_term(Rational::from(sign_fact), Monomial::from_atoms(&[zeta]));
            cf.add_term(-h * sign_fact, Monomial::one());
        }
    }
    Ok(cf)
}

pub fn polygamma_value(m: u32, z: &Rational, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(polygamma_closed_form(m, z)?.eval(ctx))
}

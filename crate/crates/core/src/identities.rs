//! Registry of checkable identities and the verification engine.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use crate::closed_form::{q, ClosedForm};
use crate::constants::ConstantAtom::{self, Li5Half, Ln2, Pi, Zeta2, Zeta3, Zeta4, Zeta5};
use crate::error::{Error, Result};
use crate::expr::{CExpr, Expr};
use crate::integrands::{cot, csc, ln_cos, ln_tan, moment, x as qx};
use crate::polygamma::polygamma_closed_form;
use crate::polylog::{li, li_oracle, PolylogQuery};
use crate::precision::{
    bits_for_digits, digits_agreed, parse_decimal_bits, to_decimal, BigReal, PrecisionContext,
};
use crate::quad::{integrate, integrate_complex, Integrand, Interval, Singularity};
use crate::series::{gen_func, integral_sum, levin_sum, GenFunc, SeriesSpec};

/// Smoothed terms used for the Fourier entries.
pub const FOURIER_TERMS: u64 = 1_000_000;
/// Accuracy tier of the Fourier entries.
pub const FOURIER_DIGITS: u32 = 5;
pub const DEFAULT_DIGITS: u32 = 30;
const LEVIN_TERMS: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierKind {
    /// `-ln 2 - Σ cos(2kx)/k = ln sin x`
    LnSin,
    /// `-ln 2 - Σ (-1)^k cos(2kx)/k = ln cos x`
    LnCos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// How the left-hand side is evaluated.
#[derive(Debug, Clone)]
pub enum Lhs {
    /// `Σ cᵢ ∫ fᵢ`
    Quad(Vec<(ClosedForm, Integrand<Expr>)>),
    ComplexQuad(Integrand<CExpr>, Part),
    /// Series through its integral representation.
    Series(SeriesSpec),
    /// Series through Levin-type extrapolation.
    Levin(SeriesSpec),
    GenFunc(GenFunc, Rational),
    /// Cosine series at `x = r·π`.
    Fourier(FourierKind, Rational),
    /// `Li₃(-t) - Li₃(-1/t)`, the second term from the quadrature oracle.
    TrilogInversion(Rational),
}

impl Lhs {
    pub fn method(&self) -> &'static str {
        match self {
            Lhs::Quad(_) => "quadrature",
            Lhs::ComplexQuad(..) => "quadrature-complex",
            Lhs::Series(_) => "integral-rep",
            Lhs::Levin(_) => "levin",
            Lhs::GenFunc(..) => "gen-func",
            Lhs::Fourier(..) => "fourier",
            Lhs::TrilogInversion(_) => "polylog",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Rhs {
    Closed(ClosedForm),
    /// Constant expression, e.g. `arcsin²(1/2)`.
    Value(Expr),
}

impl Rhs {
    pub fn eval(&self, ctx: &PrecisionContext) -> BigReal {
        match self {
            Rhs::Closed(cf) => cf.eval(ctx),
            Rhs::Value(e) => e.eval_const(ctx.bits()),
        }
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        match self {
            Rhs::Closed(cf) => Some(cf),
            Rhs::Value(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Identity {
    pub id: String,
    pub description: String,
    pub lhs: Lhs,
    pub rhs: Rhs,
    /// Declared weight of the right-hand side, where it has one.
    pub weight: Option<u32>,
    pub dependencies: Vec<String>,
}

impl Identity {
    pub fn default_digits(&self) -> u32 {
        match self.lhs {
            Lhs::Fourier(..) => FOURIER_DIGITS,
            _ => DEFAULT_DIGITS,
        }
    }

    /// Digits needed for PASS when `requested` are asked for.
    pub fn effective_digits(&self, requested: u32) -> u32 {
        match self.lhs {
            Lhs::Fourier(..) => requested.min(FOURIER_DIGITS),
            _ => requested,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Suspect,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Suspect => "SUSPECT",
            Status::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ReportWire", try_from = "ReportWire")]
pub struct VerificationReport {
    pub id: String,
    pub lhs: Option<BigReal>,
    pub rhs: Option<BigReal>,
    pub abs_err: Option<BigReal>,
    pub digits_agreed: u32,
    pub method: String,
    pub precision_digits: u32,
    pub elapsed_ms: u64,
    pub status: Status,
    pub dependencies: Vec<String>,
    /// Error text for `ERROR` reports; not part of the file format.
    pub detail: Option<String>,
}

impl VerificationReport {
    /// `digits_agreed` recomputed from the stored values.
    pub fn recomputed_digits(&self) -> Option<u32> {
        let (err, rhs) = (self.abs_err.as_ref()?, self.rhs.as_ref()?);
        Some(digits_agreed(err, rhs, self.precision_digits))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportWire {
    id: String,
    lhs: Option<String>,
    rhs: Option<String>,
    abs_err: Option<String>,
    digits_agreed: u32,
    method: String,
    precision_digits: u32,
    elapsed_ms: u64,
    status: Status,
    dependencies: Vec<String>,
}

impl From<VerificationReport> for ReportWire {
    fn from(r: VerificationReport) -> Self {
        ReportWire {
            id: r.id,
            lhs: r.lhs.as_ref().map(to_decimal),
            rhs: r.rhs.as_ref().map(to_decimal),
            abs_err: r.abs_err.as_ref().map(to_decimal),
            digits_agreed: r.digits_agreed,
            method: r.method,
            precision_digits: r.precision_digits,
            elapsed_ms: r.elapsed_ms,
            status: r.status,
            dependencies: r.dependencies,
        }
    }
}

fn parse_wire(s: &Option<String>) -> Result<Option<BigReal>> {
    s.as_ref()
        .map(|v| {
            let sig = v.chars().filter(char::is_ascii_digit).count() as u32;
            parse_decimal_bits(v, bits_for_digits(sig.max(15)))
        })
        .transpose()
}

impl TryFrom<ReportWire> for VerificationReport {
    type Error = Error;
    fn try_from(w: ReportWire) -> Result<Self> {
        Ok(VerificationReport {
            lhs: parse_wire(&w.lhs)?,
            rhs: parse_wire(&w.rhs)?,
            abs_err: parse_wire(&w.abs_err)?,
            id: w.id,
            digits_agreed: w.digits_agreed,
            method: w.method,
            precision_digits: w.precision_digits,
            elapsed_ms: w.elapsed_ms,
            status: w.status,
            dependencies: w.dependencies,
            detail: None,
        })
    }
}

pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub fn reports_from_json(s: &str) -> Result<Vec<VerificationReport>> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------------
// registry

type Row<'a> = ((i64, i64), &'a [ConstantAtom]);

fn cf(rows: &[Row<'_>]) -> ClosedForm {
    ClosedForm::from_terms(rows)
}

fn weight5(
    z5: (i64, i64),
    z2z3: (i64, i64),
    li5: (i64, i64),
    l2z4: (i64, i64),
    l3z2: (i64, i64),
    l5: (i64, i64),
) -> ClosedForm {
    cf(&[
        (z5, &[Zeta5]),
        (z2z3, &[Zeta2, Zeta3]),
        (li5, &[Li5Half]),
        (l2z4, &[Ln2, Zeta4]),
        (l3z2, &[Ln2, Ln2, Ln2, Zeta2]),
        (l5, &[Ln2, Ln2, Ln2, Ln2, Ln2]),
    ])
}

/// Right-hand sides of `T.i`..`T.vi`, in basis order
/// `ζ(5), ζ(2)ζ(3), Li₅(½), ln2·ζ(4), ln³2·ζ(2), ln⁵2`.
pub fn main_coefficients(n: usize) -> [(i64, i64); 6] {
    match n {
        1 => [(217, 8), (-9, 2), (-16, 1), (-19, 2), (8, 3), (2, 15)],
        2 => [(31, 4), (3, 2), (-16, 1), (-2, 1), (8, 3), (2, 15)],
        3 => [(-62, 1), (-21, 2), (48, 1), (81, 1), (8, 1), (-2, 5)],
        4 => [(-31, 2), (3, 1), (16, 1), (2, 1), (16, 3), (-2, 15)],
        5 => [(-155, 8), (9, 1), (16, 1), (19, 2), (16, 3), (-2, 15)],
        6 => [(-155, 8), (18, 1), (80, 1), (455, 2), (32, 3), (-2, 3)],
        _ => panic!("series index out of range"),
    }
}

/// Series of `T.i`..`T.vi`, indexed `1..=6`.
pub fn main_series(n: usize) -> SeriesSpec {
    let (o, e): (&[u32], u32) = match n {
        1 => (&[3], 2),
        2 => (&[2], 3),
        3 => (&[1, 1], 3),
        4 => (&[1], 4),
        5 => (&[1, 2], 2),
        6 => (&[1, 1, 1], 2),
        _ => panic!("series index out of range"),
    };
    SeriesSpec::new(o, e).expect("valid series")
}

pub fn main_rhs(n: usize) -> ClosedForm {
    let c = main_coefficients(n);
    weight5(c[0], c[1], c[2], c[3], c[4], c[5])
}

const ROMAN: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

fn quarter(f: Expr) -> Integrand<Expr> {
    Integrand::new(f, Interval::quarter_period())
}

fn half_line<F>(f: F) -> Integrand<F> {
    Integrand::new(f, Interval::half_line())
        .with_hints(Singularity::LogPower, Singularity::Algebraic)
}

fn one() -> ClosedForm {
    ClosedForm::rational(1)
}

fn ids(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

struct Builder(Vec<Identity>);

impl Builder {
    fn add(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        lhs: Lhs,
        rhs: Rhs,
        deps: &[&str],
    ) {
        let weight = rhs.closed_form().and_then(ClosedForm::homogeneous_weight);
        self.0.push(Identity {
            id: id.into(),
            description: description.into(),
            lhs,
            rhs,
            weight,
            dependencies: ids(deps),
        });
    }

    fn quad(&mut self, id: &str, description: &str, f: Expr, rhs: ClosedForm, deps: &[&str]) {
        self.add(
            id,
            description,
            Lhs::Quad(vec![(one(), quarter(f))]),
            Rhs::Closed(rhs),
            deps,
        );
    }
}

fn arcsine_entries(b: &mut Builder) {
    for (num, den) in [(1, 10), (1, 2), (7, 10)] {
        let xs = format!("{num}/{den}");
        let x = || Expr::rat(num, den);
        let sq = || (Expr::int(1) - x().powi(2)).sqrt();
        let r = Rational::from((num, den));
        b.add(
            format!("L1.i@x={xs}"),
            format!("½ Σ 4^k x^(2k-1)/(k C(2k,k)) = arcsin x/√(1-x²) at x = {xs}"),
            Lhs::GenFunc(GenFunc::ArcsinOverSqrt, r.clone()),
            Rhs::Value(x().asin() / sq()),
            &[],
        );
        b.add(
            format!("L1.ii@x={xs}"),
            format!("½ Σ 4^k x^(2k)/(k² C(2k,k)) = arcsin² x at x = {xs}"),
            Lhs::GenFunc(GenFunc::ArcsinSquared, r.clone()),
            Rhs::Value(x().asin().powi(2)),
            &[],
        );
        b.add(
            format!("L1.iii@x={xs}"),
            format!(
                "3/2 Σ 4^k H_k^(2) x^(2k)/(k² C) - 3/2 Σ 4^k x^(2k)/(k⁴ C) = arcsin⁴ x at x = {xs}"
            ),
            Lhs::GenFunc(GenFunc::ArcsinFourth, r),
            Rhs::Value(x().asin().powi(4)),
            &[],
        );
    }
}

fn unit_moment_entries(b: &mut Builder) {
    use crate::series::harmonic;
    for k in [1u64, 2, 3, 5, 10] {
        let h1 = harmonic(k, 1);
        let h2 = harmonic(k, 2);
        let h3 = harmonic(k, 3);
        let kr = Rational::from(k);
        let k2 = Rational::from(&kr * &kr);
        let k3 = Rational::from(&k2 * &kr);
        let xk = || {
            if k == 1 {
                Expr::int(1)
            } else {
                Expr::x().powi(k as i32 - 1)
            }
        };
        let lnx = || Expr::x().ln();
        let ln1mx = || Expr::from_right().ln();
        let unit = |f: Expr| Lhs::Quad(vec![(one(), Integrand::new(f, Interval::unit()))]);
        let rat = |r: Rational| ClosedForm::rational(r);
        let z = |c: Rational, a: ConstantAtom| ClosedForm::term(c, &[a]);

        let rhs_i = rat(-Rational::from(&h1 / &kr));
        let rhs_ii = rat(Rational::from(&h1 / &k3) * -2i32
            + Rational::from(&h2 / &k2) * -2i32
            + Rational::from(&h3 / &kr) * -2i32)
            + z(Rational::from(2) / &k2, Zeta2)
            + z(Rational::from(2) / &kr, Zeta3);
        let h1sq = Rational::from(h1.square_ref());
        let rhs_iii = rat((h1sq.clone() + &h2) / &kr);
        let rhs_iv = rat(-Rational::from(&h1sq / &k2)
            - Rational::from(&h2 / &k2)
            - Rational::from(&h3 / &kr) * 2u32
            - Rational::from(&h1 * &h2) / &kr * 2u32)
            + z(Rational::from(&h1 / &kr) * 2u32, Zeta2)
            + z(Rational::from(2) / &kr, Zeta3);
        let h1cu = Rational::from(&h1sq * &h1);
        let rhs_v = rat(-(h1cu + Rational::from(&h1 * &h2) * 3u32 + h3.clone() * 2u32) / &kr);

        let rows: [(&str, &str, Expr, ClosedForm); 5] = [
            ("i", "ln(1-x)", xk() * ln1mx(), rhs_i),
            ("ii", "ln²x ln(1-x)", xk() * lnx().powi(2) * ln1mx(), rhs_ii),
            ("iii", "ln²(1-x)", xk() * ln1mx().powi(2), rhs_iii),
            (
                "iv",
                "ln x ln²(1-x)",
                xk() * lnx() * ln1mx().powi(2),
                rhs_iv,
            ),
            ("v", "ln³(1-x)", xk() * ln1mx().powi(3), rhs_v),
        ];
        for (r, what, f, rhs) in rows {
            b.add(
                format!("L2.{r}@k={k}"),
                format!("∫₀¹ x^(k-1) {what} dx at k = {k}"),
                unit(f),
                Rhs::Closed(rhs),
                &[],
            );
        }
    }
}

fn fourier_moment_entries(b: &mut Builder) {
    for (num, den, label) in [(1, 6, "π/6"), (1, 3, "π/3")] {
        let at = || Expr::pi() * Expr::rat(num, den);
        b.add(
            format!("L3.i@x={label}"),
            format!("-ln 2 - Σ cos(2kx)/k = ln sin x at x = {label}"),
            Lhs::Fourier(FourierKind::LnSin, Rational::from((num, den))),
            Rhs::Value(at().sin().ln()),
            &[],
        );
        b.add(
            format!("L3.ii@x={label}"),
            format!("-ln 2 - Σ (-1)^k cos(2kx)/k = ln cos x at x = {label}"),
            Lhs::Fourier(FourierKind::LnCos, Rational::from((num, den))),
            Rhs::Value(at().cos().ln()),
            &[],
        );
    }
    let z3l = |a: (i64, i64), b: (i64, i64)| cf(&[(a, &[Zeta3]), (b, &[Ln2, Zeta2])]);
    let pz = |a: (i64, i64), b: (i64, i64)| cf(&[(a, &[Pi, Zeta3]), (b, &[Pi, Pi, Pi, Ln2])]);
    let w5 = |a: (i64, i64), c: (i64, i64), d: (i64, i64)| {
        cf(&[(a, &[Zeta5]), (c, &[Zeta2, Zeta3]), (d, &[Ln2, Zeta4])])
    };
    let rows: [(&str, &str, Expr, ClosedForm); 6] = [
        ("iii", "x ln sin x", moment(1, 1, 0), z3l((7, 16), (-3, 4))),
        ("iv", "x ln cos x", moment(1, 0, 1), z3l((-7, 16), (-3, 4))),
        ("v", "x² ln sin x", moment(2, 1, 0), pz((3, 16), (-1, 24))),
        ("vi", "x² ln cos x", moment(2, 0, 1), pz((-1, 4), (-1, 24))),
        (
            "vii",
            "x³ ln sin x",
            moment(3, 1, 0),
            w5((-93, 128), (27, 32), (-45, 32)),
        ),
        (
            "viii",
            "x³ ln cos x",
            moment(3, 0, 1),
            w5((93, 128), (-9, 8), (-45, 32)),
        ),
    ];
    for (r, what, f, rhs) in rows {
        b.quad(
            &format!("L3.{r}"),
            &format!("∫₀^(π/2) {what} dx"),
            f,
            rhs,
            &[],
        );
    }
}

fn small_series_entries(b: &mut Builder) {
    type Row<'a> = (&'a str, &'a [u32], u32, ClosedForm, &'a [&'a str]);
    let rows: [Row; 3] = [
        ("i", &[], 2, ClosedForm::term(3, &[Zeta2]), &[]),
        (
            "ii",
            &[],
            3,
            cf(&[((-7, 2), &[Zeta3]), ((6, 1), &[Ln2, Zeta2])]),
            &["L3.iii"],
        ),
        (
            "iii",
            &[1],
            2,
            cf(&[((7, 2), &[Zeta3]), ((6, 1), &[Ln2, Zeta2])]),
            &["L3.iv"],
        ),
    ];
    for (r, o, n, rhs, deps) in rows {
        let s = SeriesSpec::new(o, n).expect("valid");
        b.add(
            format!("L4.{r}"),
            s.to_string(),
            Lhs::Series(s),
            Rhs::Closed(rhs),
            deps,
        );
    }
    b.quad(
        "L4.iv",
        "∫₀^(π/2) cot x ln² cos x dx",
        cot() * ln_cos().powi(2),
        ClosedForm::term(q(1, 4), &[Zeta3]),
        &[],
    );
}

fn log_sine_entries(b: &mut Builder) {
    b.quad(
        "L5.i",
        "∫₀^(π/2) ln³ sin x dx",
        moment(0, 3, 0),
        cf(&[
            ((-3, 4), &[Pi, Zeta3]),
            ((-1, 8), &[Pi, Pi, Pi, Ln2]),
            ((-1, 2), &[Pi, Ln2, Ln2, Ln2]),
        ]),
        &[],
    );
    b.quad(
        "L5.ii",
        "∫₀^(π/2) ln sin x ln² cos x dx",
        moment(0, 1, 2),
        cf(&[((1, 8), &[Pi, Zeta3]), ((-1, 2), &[Pi, Ln2, Ln2, Ln2])]),
        &[],
    );
    b.quad(
        "L5.iii",
        "∫₀^(π/2) x ln³ tan x dx",
        qx() * ln_tan().powi(3),
        cf(&[((93, 16), &[Zeta5]), ((21, 16), &[Zeta2, Zeta3])]),
        &["L5.tri@t=1/4", "L5.tri@t=1/2", "L5.tri@t=3/4"],
    );
    for (num, den) in [(1, 4), (1, 2), (3, 4)] {
        let t = || Expr::rat(num, den);
        // -(1/6) ln³t - ζ(2) ln t
        let rhs = -(t().ln().powi(3) / Expr::int(6)) - Expr::pi().powi(2) / Expr::int(6) * t().ln();
        b.add(
            format!("L5.tri@t={num}/{den}"),
            format!("Li₃(-t) - Li₃(-1/t) = -ln³t/6 - ζ(2) ln t at t = {num}/{den}"),
            Lhs::TrilogInversion(Rational::from((num, den))),
            Rhs::Value(rhs),
            &[],
        );
    }
}

fn mixed_moment_entries(b: &mut Builder) {
    b.quad(
        "L6.i",
        "∫₀^(π/2) x² csc² x ln² cos x dx",
        qx().powi(2) * csc().powi(2) * ln_cos().powi(2),
        cf(&[
            ((1, 8), &[Pi, Zeta3]),
            ((1, 6), &[Pi, Pi, Pi, Ln2]),
            ((1, 3), &[Pi, Ln2, Ln2, Ln2]),
        ]),
        &["E2.5", "E2.6", "E2.7"],
    );
    b.quad(
        "L6.ii",
        "∫₀^(π/2) x cot x ln² cos x dx",
        qx() * cot() * ln_cos().powi(2),
        cf(&[
            ((-3, 16), &[Pi, Zeta3]),
            ((1, 24), &[Pi, Pi, Pi, Ln2]),
            ((1, 6), &[Pi, Ln2, Ln2, Ln2]),
        ]),
        &["L6.i", "L3.vi"],
    );
    b.quad(
        "L7.i",
        "∫₀^(π/2) x² cot x ln² cos x dx",
        qx().powi(2) * cot() * ln_cos().powi(2),
        weight5((-217, 64), (-9, 16), (2, 1), (79, 16), (2, 3), (-1, 60)),
        &["E2.10", "E2.11", "E2.12"],
    );
    b.quad(
        "L7.ii",
        "∫₀^(π/2) x ln³ sin x dx",
        moment(1, 3, 0),
        l7ii(),
        &["E2.15", "E2.16", "E2.17"],
    );
    let deps = ["L5.i", "L5.iii", "L7.ii", "L5.ii"];
    b.quad(
        "L8.i",
        "∫₀^(π/2) x ln sin x ln² cos x dx",
        moment(1, 1, 2),
        weight5((155, 128), (13, 32), (-1, 1), (-49, 32), (-5, 6), (1, 120)),
        &deps,
    );
    b.quad(
        "L8.ii",
        "∫₀^(π/2) x ln² sin x ln cos x dx",
        moment(1, 2, 1),
        weight5((-155, 128), (-1, 32), (1, 1), (49, 32), (-2, 3), (-1, 120)),
        &deps,
    );
}

fn l7ii() -> ClosedForm {
    weight5((-93, 128), (-9, 8), (3, 1), (57, 32), (-1, 2), (-1, 40))
}

fn half_line_entries(b: &mut Builder) {
    let t = || Expr::x();
    let one_t2 = || Expr::int(1) + t().powi(2);
    let ln1t2 = || t().powi(2).ln1p();
    let semi = |f: Expr| Lhs::Quad(vec![(one(), half_line(f))]);
    let l4 = || CExpr::ln1p_i(Expr::x()).powi(4);

    b.add(
        "E2.5",
        "∫₀^∞ ln⁴(1+x²)/x² dx",
        semi(ln1t2().powi(4) / t().powi(2)),
        Rhs::Closed(cf(&[
            ((48, 1), &[Pi, Zeta3]),
            ((8, 1), &[Pi, Pi, Pi, Ln2]),
            ((32, 1), &[Pi, Ln2, Ln2, Ln2]),
        ])),
        &["L5.i"],
    );
    b.add(
        "E2.6",
        "∫₀^∞ arctan⁴x/x² dx",
        semi(t().atan().powi(4) / t().powi(2)),
        Rhs::Closed(cf(&[((-9, 4), &[Pi, Zeta3]), ((1, 2), &[Pi, Pi, Pi, Ln2])])),
        &["L3.v"],
    );
    b.add(
        "E2.7",
        "Re ∫₀^∞ ln⁴(1+ix)/x² dx",
        Lhs::ComplexQuad(half_line(l4().div_real(t().powi(2))), Part::Re),
        Rhs::Closed(ClosedForm::zero()),
        &[],
    );
    b.add(
        "E2.10",
        "∫₀^∞ ln⁴(1+x²)/(x(1+x²)) dx",
        semi(ln1t2().powi(4) / (t() * one_t2())),
        Rhs::Closed(ClosedForm::term(12, &[Zeta5])),
        &[],
    );
    b.add(
        "E2.11",
        "∫₀^∞ arctan⁴x/(x(1+x²)) dx",
        semi(t().atan().powi(4) / (t() * one_t2())),
        Rhs::Closed(cf(&[
            ((93, 32), &[Zeta5]),
            ((-27, 8), &[Zeta2, Zeta3]),
            ((45, 8), &[Ln2, Zeta4]),
        ])),
        &[],
    );
    b.add(
        "E2.12",
        "Re ∫₀^∞ ln⁴(1+ix)/(x(1+x²)) dx",
        Lhs::ComplexQuad(half_line(l4().div_real(t() * one_t2())), Part::Re),
        Rhs::Closed(weight5(
            (24, 1),
            (0, 1),
            (-12, 1),
            (-24, 1),
            (-4, 1),
            (1, 10),
        )),
        &[],
    );
    b.add(
        "E2.15",
        "(π/2) ∫₀^(π/2) ln³ sin x dx",
        Lhs::Quad(vec![(
            ClosedForm::term(q(1, 2), &[Pi]),
            quarter(moment(0, 3, 0)),
        )]),
        Rhs::Closed(cf(&[
            ((-9, 4), &[Zeta2, Zeta3]),
            ((-45, 8), &[Ln2, Zeta4]),
            ((-3, 2), &[Ln2, Ln2, Ln2, Zeta2]),
        ])),
        &[],
    );
    b.add(
        "E2.16",
        "∫₀^∞ arctan³x ln(1+x²)/(1+x²) dx",
        semi(t().atan().powi(3) * ln1t2() / one_t2()),
        Rhs::Closed(cf(&[
            ((-93, 64), &[Zeta5]),
            ((9, 4), &[Zeta2, Zeta3]),
            ((45, 16), &[Ln2, Zeta4]),
        ])),
        &[],
    );
    b.add(
        "E2.17",
        "Im ∫₀^∞ ln⁴(1+ix)/(1+x²) dx",
        Lhs::ComplexQuad(half_line(l4().div_real(one_t2())), Part::Im),
        Rhs::Closed(weight5((0, 1), (0, 1), (12, 1), (24, 1), (4, 1), (-1, 10))),
        &[],
    );
    let i_int = || quarter(moment(1, 1, 2));
    let j_int = || quarter(moment(1, 2, 1));
    b.add(
        "E2.19",
        "I - J with I, J the two mixed ln sin / ln cos moments",
        Lhs::Quad(vec![(one(), i_int()), (ClosedForm::rational(-1), j_int())]),
        Rhs::Closed(weight5(
            (155, 64),
            (7, 16),
            (-2, 1),
            (-49, 16),
            (-1, 6),
            (1, 60),
        )),
        &["L5.i", "L5.iii", "L7.ii"],
    );
    b.add(
        "E2.20",
        "I + J with I, J the two mixed ln sin / ln cos moments",
        Lhs::Quad(vec![(one(), i_int()), (one(), j_int())]),
        Rhs::Closed(cf(&[
            ((3, 8), &[Zeta2, Zeta3]),
            ((-3, 2), &[Ln2, Ln2, Ln2, Zeta2]),
        ])),
        &["L5.ii"],
    );
    let s5 = SeriesSpec::new(&[], 5).expect("valid");
    b.add(
        "E3.3",
        format!("{s5} = -16/3 ∫₀^(π/2) x ln³ sin x dx"),
        Lhs::Levin(s5),
        Rhs::Closed(l7ii().scale(&q(-16, 3))),
        &["L7.ii"],
    );
}

fn polygamma_entries(b: &mut Builder) {
    for m in [1u32, 2] {
        for k in [0u32, 1, 2, 4] {
            let xk = || {
                if k == 0 {
                    Expr::int(1)
                } else {
                    Expr::x().powi(k as i32)
                }
            };
            // ln x is taken from x on [0, 1/2] and from 1 - x on [1/2, 1]
            let left = -(xk() * Expr::x().ln().powi(m as i32) / (Expr::int(1) - Expr::x()));
            let right = -(xk() * (-Expr::from_right()).ln1p().powi(m as i32) / Expr::from_right());
            let pieces = vec![
                (
                    one(),
                    Integrand::new(left, Interval::finite(Expr::int(0), Expr::rat(1, 2))),
                ),
                (
                    one(),
                    Integrand::new(right, Interval::finite(Expr::rat(1, 2), Expr::int(1))),
                ),
            ];
            let rhs = polygamma_closed_form(m, &Rational::from(k + 1)).expect("supported point");
            b.add(
                format!("E1.3@m={m},k={k}"),
                format!("-∫₀¹ x^k ln^m x/(1-x) dx = ψ^({m})({})", k + 1),
                Lhs::Quad(pieces),
                Rhs::Closed(rhs),
                &[],
            );
        }
    }
}

fn main_entries(b: &mut Builder) {
    let deps: [&[&str]; 6] = [
        &["L4.i", "L4.iv", "L6.ii", "L7.i"],
        &["L3.vii", "L7.ii", "E3.3"],
        &["T.ii", "L7.i"],
        &["L8.ii", "T.ii", "T.i", "L4.ii", "L4.i"],
        &["L8.i", "T.iii", "T.ii", "T.i", "L4.iii", "L4.i"],
        &["L7.ii", "L5.i", "T.v", "T.i"],
    ];
    for n in 1..=6 {
        let s = main_series(n);
        b.add(
            format!("T.{}", ROMAN[n - 1]),
            s.to_string(),
            Lhs::Series(s),
            Rhs::Closed(main_rhs(n)),
            deps[n - 1],
        );
    }
}

/// Every registry entry, in a fixed order.
pub fn registry() -> &'static [Identity] {
    static REG: OnceLock<Vec<Identity>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut b = Builder(Vec::new());
        arcsine_entries(&mut b);
        unit_moment_entries(&mut b);
        fourier_moment_entries(&mut b);
        small_series_entries(&mut b);
        log_sine_entries(&mut b);
        mixed_moment_entries(&mut b);
        half_line_entries(&mut b);
        polygamma_entries(&mut b);
        main_entries(&mut b);
        b.0
    })
}

pub fn lookup(id: &str) -> Result<&'static Identity> {
    registry()
        .iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

// ---------------------------------------------------------------------------
// evaluation

fn quad_target(digits: u32, ctx: &PrecisionContext) -> u32 {
    (digits + 5).min(ctx.digits() - 5)
}

fn evaluate_lhs(lhs: &Lhs, digits: u32, ctx: &PrecisionContext) -> Result<BigReal> {
    let target = quad_target(digits, ctx);
    match lhs {
        Lhs::Quad(pieces) => {
            let mut acc = ctx.zero();
            for (c, f) in pieces {
                let r = integrate(f, ctx, target)?;
                acc += r.value * c.eval(ctx);
            }
            Ok(acc)
        }
        Lhs::ComplexQuad(f, part) => {
            let r = integrate_complex(f, ctx, target)?;
            Ok(match part {
                Part::Re => r.value.re,
                Part::Im => r.value.im,
            })
        }
        Lhs::Series(s) => Ok(integral_sum(s, ctx, target)?.value),
        Lhs::Levin(s) => Ok(levin_sum(s, ctx, LEVIN_TERMS)?.value),
        Lhs::GenFunc(which, x) => gen_func(*which, &ctx.real(x), ctx),
        Lhs::Fourier(which, r) => {
            let x = crate::elementary::pi(ctx) * ctx.real(r);
            fourier_sum(*which, &x, FOURIER_TERMS, ctx)
        }
        Lhs::TrilogInversion(t) => {
            let t = ctx.real(t);
            let a = li(&PolylogQuery::new(3, -t.clone()), ctx)?;
            let b = li_oracle(&PolylogQuery::new(3, -t.recip()), ctx)?;
            Ok(a - b)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    id: &str,
    method: &str,
    lhs: BigReal,
    rhs: BigReal,
    needed: u32,
    ctx: &PrecisionContext,
    started: Instant,
    dependencies: Vec<String>,
) -> VerificationReport {
    let abs_err = Float::with_val(ctx.bits(), &lhs - &rhs).abs();
    let agreed = digits_agreed(&abs_err, &rhs, ctx.digits());
    VerificationReport {
        id: id.to_string(),
        lhs: Some(lhs),
        rhs: Some(rhs),
        abs_err: Some(abs_err),
        digits_agreed: agreed,
        method: method.to_string(),
        precision_digits: ctx.digits(),
        elapsed_ms: started.elapsed().as_millis() as u64,
        status: if agreed >= needed {
            Status::Pass
        } else {
            Status::Fail
        },
        dependencies,
        detail: None,
    }
}

fn error_report(
    ident: &Identity,
    e: &Error,
    ctx: &PrecisionContext,
    started: Instant,
) -> VerificationReport {
    VerificationReport {
        id: ident.id.clone(),
        lhs: None,
        rhs: Some(ident.rhs.eval(ctx)),
        abs_err: None,
        digits_agreed: 0,
        method: ident.lhs.method().to_string(),
        precision_digits: ctx.digits(),
        elapsed_ms: started.elapsed().as_millis() as u64,
        status: Status::Error,
        dependencies: ident.dependencies.clone(),
        detail: Some(e.to_string()),
    }
}

/// Verification run sharing dependency outcomes between entries.
struct Run {
    digits: u32,
    ctx: PrecisionContext,
    memo: Mutex<HashMap<String, Status>>,
}

impl Run {
    fn new(digits: u32, ctx: &PrecisionContext) -> Result<Self> {
        if digits + 10 > ctx.digits() {
            return Err(Error::Precision(format!(
                "verifying {digits} digits needs working precision of at least {} digits",
                digits + 10
            )));
        }
        Ok(Run {
            digits,
            ctx: *ctx,
            memo: Mutex::new(HashMap::new()),
        })
    }

    fn status_of(&self, id: &str) -> Status {
        if let Some(s) = self.memo.lock().expect("memo poisoned").get(id) {
            return *s;
        }
        let s = match lookup(id) {
            Ok(ident) => match self.evaluate(ident) {
                Ok(r) => r.status,
                Err(_) => Status::Error,
            },
            Err(_) => Status::Error,
        };
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert(id.to_string(), s);
        s
    }

    fn evaluate(&self, ident: &Identity) -> Result<VerificationReport> {
        let dep_status: Vec<Status> = ident
            .dependencies
            .iter()
            .map(|d| self.status_of(d))
            .collect();
        let dep_ok = dep_status.iter().all(|s| *s == Status::Pass);
        let started = Instant::now();
        let ctx = &self.ctx;
        let lhs = evaluate_lhs(&ident.lhs, self.digits, ctx)?;
        let rhs = ident.rhs.eval(ctx);
        let mut r = report(
            &ident.id,
            ident.lhs.method(),
            lhs,
            rhs,
            ident.effective_digits(self.digits),
            ctx,
            started,
            ident.dependencies.clone(),
        );
        if r.status == Status::Pass && !dep_ok {
            r.status = Status::Suspect;
        }
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert(ident.id.clone(), r.status);
        Ok(r)
    }
}

/// Verify one identity to `digits` (at most `ctx.digits() - 10`).
///
/// Dependencies are verified first; a PASS with a failing dependency is
/// reported as SUSPECT. Numeric failures are returned as errors.
pub fn verify(id: &str, digits: u32, ctx: &PrecisionContext) -> Result<VerificationReport> {
    let ident = lookup(id)?;
    Run::new(digits, ctx)?.evaluate(ident)
}

/// Verify every entry whose id starts with `filter` (`"all"` matches all).
/// Per-entry failures become ERROR reports; output is sorted by id.
pub fn verify_all(
    filter: &str,
    digits: u32,
    ctx: &PrecisionContext,
) -> Result<Vec<VerificationReport>> {
    let run = Run::new(digits, ctx)?;
    let selected: Vec<&Identity> = registry()
        .iter()
        .filter(|i| filter == "all" || i.id.starts_with(filter))
        .collect();
    let mut out: Vec<VerificationReport> = selected
        .par_iter()
        .map(|ident| {
            let started = Instant::now();
            run.evaluate(ident)
                .unwrap_or_else(|e| error_report(ident, &e, ctx, started))
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

/// `-ln 2 - Σ_{k≤N} c_k cos(2kx)/k`, with the last two partial sums
/// averaged to damp the oscillating tail.
fn fourier_sum(which: FourierKind, x: &BigReal, n: u64, ctx: &PrecisionContext) -> Result<BigReal> {
    let bits = ctx.bits();
    let half_pi = crate::elementary::pi(ctx) / 2u32;
    let dist = Float::with_val(bits, 0.1);
    let ok = match which {
        FourierKind::LnSin => *x >= dist && *x <= Float::with_val(bits, &half_pi * 2u32) - &dist,
        FourierKind::LnCos => {
            Float::with_val(bits, x.abs_ref()) <= Float::with_val(bits, &half_pi - &dist)
        }
    };
    if !ok {
        return Err(Error::domain(
            "fourier_check",
            "x is too close to a singular endpoint",
        ));
    }
    if n < 2 {
        return Err(Error::domain("fourier_check", "need at least two terms"));
    }
    // the alternating form is the plain one at x + π/2
    let y = match which {
        FourierKind::LnSin => Float::with_val(bits, x),
        FourierKind::LnCos => Float::with_val(bits, x + &half_pi),
    };
    let c2 = Float::with_val(bits, &y * 2u32).cos();
    let two_c2 = Float::with_val(bits, &c2 * 2u32);
    // cos(2k y) by the Chebyshev recurrence
    let mut prev = Float::with_val(bits, 1);
    let mut cur = c2;
    let mut sum = Float::new(bits);
    let mut last = Float::new(bits);
    for k in 1..=n {
        if k == n {
            last = sum.clone();
        }
        sum += Float::with_val(bits, &cur / k);
        let next = Float::with_val(bits, &two_c2 * &cur) - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    let smoothed = (sum + last) / 2u32;
    let ln2 = Float::with_val(bits, rug::float::Constant::Log2);
    Ok(-ln2 - smoothed)
}

/// Check a cosine expansion at `x` with `n` smoothed terms.
pub fn fourier_check(
    which: FourierKind,
    x: &BigReal,
    n: u64,
    ctx: &PrecisionContext,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let lhs = fourier_sum(which, x, n, ctx)?;
    let rhs = match which {
        FourierKind::LnSin => Float::with_val(ctx.bits(), x.sin_ref()).ln(),
        FourierKind::LnCos => Float::with_val(ctx.bits(), x.cos_ref()).ln(),
    };
    let id = match which {
        FourierKind::LnSin => "L3.i",
        FourierKind::LnCos => "L3.ii",
    };
    Ok(report(
        id,
        "fourier",
        lhs,
        rhs,
        FOURIER_DIGITS,
        ctx,
        started,
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete_and_unique() {
        let reg = registry();
        assert!(reg.len() >= 40);
        let mut ids: Vec<&str> = reg.iter().map(|i| i.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), reg.len());
        for i in reg {
            for d in &i.dependencies {
                assert!(lookup(d).is_ok(), "{} depends on missing {d}", i.id);
            }
        }
    }

    #[test]
    fn registry_examples() {
        let t6 = lookup("T.vi").unwrap();
        assert_eq!(
            t6.rhs.closed_form().unwrap(),
            &weight5((-155, 8), (18, 1), (80, 1), (455, 2), (32, 3), (-2, 3))
        );
        let l2 = lookup("L2.i@k=2").unwrap();
        assert_eq!(
            l2.rhs.closed_form().unwrap(),
            &ClosedForm::rational(q(-3, 4))
        );
        assert!(lookup("E2.7").unwrap().rhs.closed_form().unwrap().is_zero());
        assert!(matches!(lookup("NOPE"), Err(Error::UnknownIdentity(_))));
    }

    #[test]
    fn main_series_have_weight_five() {
        for i in registry().iter().filter(|i| i.id.starts_with("T.")) {
            assert_eq!(i.weight, Some(5), "{}", i.id);
        }
    }

    #[test]
    fn verify_simple_entries() {
        let ctx = PrecisionContext::new(45).unwrap();
        for id in ["L3.iii", "L2.i@k=2", "L1.ii@x=1/2", "E1.3@m=2,k=2"] {
            let r = verify(id, 30, &ctx).unwrap();
            assert_eq!(r.status, Status::Pass, "{id}: {r:?}");
        }
    }

    #[test]
    fn precision_precondition() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(matches!(
            verify("L3.iii", 25, &ctx),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn fourier_examples() {
        let ctx = PrecisionContext::new(20).unwrap();
        let pi = crate::elementary::pi(&ctx);
        let r = fourier_check(FourierKind::LnSin, &(pi.clone() / 2u32), 10_000, &ctx).unwrap();
        assert_eq!(r.status, Status::Pass);
        let r = fourier_check(FourierKind::LnCos, &ctx.real(0), 10_000, &ctx).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(fourier_check(FourierKind::LnSin, &ctx.real(0.05), 100, &ctx).is_err());
        assert!(fourier_check(FourierKind::LnCos, &(pi / 2u32), 100, &ctx).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let ctx = PrecisionContext::new(45).unwrap();
        let r = verify("L3.iv", 30, &ctx).unwrap();
        let s = reports_to_json(std::slice::from_ref(&r));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let keys: Vec<&str> = v[0]
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        let mut expect = vec![
            "id",
            "lhs",
            "rhs",
            "abs_err",
            "digits_agreed",
            "method",
            "precision_digits",
            "elapsed_ms",
            "status",
            "dependencies",
        ];
        let mut got = keys.clone();
        got.sort_unstable();
        expect.sort_unstable();
        assert_eq!(got, expect);
        assert!(v[0]["lhs"].is_string());
        let back = reports_from_json(&s).unwrap();
        assert_eq!(back[0].id, r.id);
        assert_eq!(back[0].recomputed_digits(), Some(r.digits_agreed));
    }
}

//! The closed-form constant vocabulary and its evaluation.
//!
//! `ζ(3)`, `ζ(5)` and Euler's constant come from Euler–Maclaurin summation
//! with an explicit Bernoulli tail; `ζ(2)`, `ζ(4)` are derived from `π`;
//! `Li₅(½)` is summed from its defining series. Values are memoised per
//! `(atom, digits)` in a process-wide cache that can be persisted to a
//! plain-text file.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::{Mutex, OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::Result;
use crate::precision::{bits_for_digits, to_decimal, BigReal, PrecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstantAtom {
    Pi,
    Ln2,
    EulerGamma,
    Zeta2,
    Zeta3,
    Zeta4,
    Zeta5,
    Li5Half,
}

impl ConstantAtom {
    pub const ALL: [ConstantAtom; 8] = [
        ConstantAtom::Pi,
        ConstantAtom::Ln2,
        ConstantAtom::EulerGamma,
        ConstantAtom::Zeta2,
        ConstantAtom::Zeta3,
        ConstantAtom::Zeta4,
        ConstantAtom::Zeta5,
        ConstantAtom::Li5Half,
    ];

    /// `ζ(m)` for `m ∈ {2, 3, 4, 5}`.
    pub fn zeta(m: u32) -> Option<ConstantAtom> {
        match m {
            2 => Some(ConstantAtom::Zeta2),
            3 => Some(ConstantAtom::Zeta3),
            4 => Some(ConstantAtom::Zeta4),
            5 => Some(ConstantAtom::Zeta5),
            _ => None,
        }
    }

    /// Weight: `π`, `ln 2`, `γ` count 1, `ζ(m)` counts `m`, `Li₅(½)` counts 5.
    pub fn weight(self) -> u32 {
        match self {
            ConstantAtom::Pi | ConstantAtom::Ln2 | ConstantAtom::EulerGamma => 1,
            ConstantAtom::Zeta2 => 2,
            ConstantAtom::Zeta3 => 3,
            ConstantAtom::Zeta4 => 4,
            ConstantAtom::Zeta5 | ConstantAtom::Li5Half => 5,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ConstantAtom::Pi => "pi",
            ConstantAtom::Ln2 => "ln2",
            ConstantAtom::EulerGamma => "gamma",
            ConstantAtom::Zeta2 => "zeta2",
            ConstantAtom::Zeta3 => "zeta3",
            ConstantAtom::Zeta4 => "zeta4",
            ConstantAtom::Zeta5 => "zeta5",
            ConstantAtom::Li5Half => "li5half",
        }
    }

    pub fn from_tag(tag: &str) -> Option<ConstantAtom> {
        ConstantAtom::ALL.into_iter().find(|a| a.tag() == tag)
    }

    fn symbol(self) -> &'static str {
        match self {
            ConstantAtom::Pi => "π",
            ConstantAtom::Ln2 => "ln2",
            ConstantAtom::EulerGamma => "γ",
            ConstantAtom::Zeta2 => "ζ(2)",
            ConstantAtom::Zeta3 => "ζ(3)",
            ConstantAtom::Zeta4 => "ζ(4)",
            ConstantAtom::Zeta5 => "ζ(5)",
            ConstantAtom::Li5Half => "Li5(1/2)",
        }
    }
}

impl fmt::Display for ConstantAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Value of `atom` accurate to `ctx.digits()`, served from the global cache.
pub fn constant(atom: ConstantAtom, ctx: &PrecisionContext) -> BigReal {
    global_cache().get_or_compute(atom, ctx)
}

fn compute(atom: ConstantAtom, ctx: &PrecisionContext) -> BigReal {
    let bits = ctx.bits();
    match atom {
        ConstantAtom::Pi => Float::with_val(bits, rug::float::Constant::Pi),
        ConstantAtom::Ln2 => Float::with_val(bits, rug::float::Constant::Log2),
        ConstantAtom::EulerGamma => euler_gamma_em(ctx),
        ConstantAtom::Zeta2 => {
            let pi = Float::with_val(bits + 16, rug::float::Constant::Pi);
            Float::with_val(bits, pi.square() / 6u32)
        }
        ConstantAtom::Zeta4 => {
            let pi = Float::with_val(bits + 16, rug::float::Constant::Pi);
            Float::with_val(bits, pi.pow(4u32) / 90u32)
        }
        ConstantAtom::Zeta3 => zeta_em(3, ctx),
        ConstantAtom::Zeta5 => zeta_em(5, ctx),
        ConstantAtom::Li5Half => li5_half_series(ctx),
    }
}

/// Bernoulli numbers `B_0..=B_n` (with `B_1 = -1/2`), cached process-wide.
pub fn bernoulli(n: usize) -> Rational {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(vec![Rational::from(1)]));
    let mut b = table.lock().expect("bernoulli table poisoned");
    while b.len() <= n {
        let m = b.len();
        if m >= 3 && m % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        // sum_{k<m} C(m+1, k) B_k = -(m+1) B_m
        let mut binom = Integer::from(1);
        let mut acc = Rational::new();
        for (k, bk) in b.iter().enumerate() {
            if k > 0 {
                binom *= (m + 2 - k) as u64;
                binom /= k as u64;
            }
            if *bk.numer() != 0 {
                acc += Rational::from(bk * &binom);
            }
        }
        let bm = -acc / Rational::from(m as u64 + 1);
        b.push(bm);
    }
    b[n].clone()
}

/// `ζ(s)` for integer `s ≥ 2` by Euler–Maclaurin summation.
///
/// Sums `N ≈ digits` terms directly, then the integral, the half-term and
/// Bernoulli corrections until a correction drops below `2^-(bits+16)`.
pub fn zeta_em(s: u32, ctx: &PrecisionContext) -> BigReal {
    assert!(s >= 2, "zeta_em needs s >= 2");
    let bits = ctx.bits() + 32;
    let n = (ctx.digits() + ctx.guard()).max(10);
    let nf = Float::with_val(bits, n);

    let mut sum = Float::new(bits);
    for k in 1..n {
        let kf = Float::with_val(bits, k);
        sum += kf.pow(s).recip();
    }
    let n_pow = Float::with_val(bits, nf.clone().pow(s)); // N^s
    let n_s = n_pow.recip(); // N^-s
    sum += Float::with_val(bits, &n_s * &nf) / (s - 1);
    sum += Float::with_val(bits, &n_s / 2u32);

    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 16));
    let n2 = Float::with_val(bits, nf.square_ref()).recip();
    // rising = s (s+1) ... (s+2j-2); npow = N^{-s-2j+1}
    let mut rising = Float::with_val(bits, s);
    let mut npow = Float::with_val(bits, &n_s / &nf);
    let mut fact = Float::with_val(bits, 2); // (2j)!
    for j in 1..=(4 * n as usize) {
        let b2j = bernoulli(2 * j);
        let term = Float::with_val(bits, &b2j) * &rising * &npow / &fact;
        let small = term.clone().abs() < tol;
        sum += term;
        if small {
            break;
        }
        let jj = j as u32;
        rising *= (s + 2 * jj - 1) * (s + 2 * jj);
        npow *= &n2;
        fact *= (2 * jj + 1) * (2 * jj + 2);
    }
    Float::with_val(ctx.bits(), sum)
}

/// Euler's constant from `H_N - ln N` with the Bernoulli asymptotic tail.
pub fn euler_gamma_em(ctx: &PrecisionContext) -> BigReal {
    let bits = ctx.bits() + 32;
    let n = (ctx.digits() + ctx.guard()).max(10);
    let nf = Float::with_val(bits, n);
    let mut h = Float::new(bits);
    for k in 1..=n {
        h += Float::with_val(bits, k).recip();
    }
    let mut g =
        h - Float::with_val(bits, nf.ln_ref()) - Float::with_val(bits, nf.recip_ref()) / 2u32;
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 16));
    let n2 = Float::with_val(bits, nf.square_ref()).recip();
    let mut npow = n2.clone();
    for j in 1..=(4 * n as usize) {
        let term = Float::with_val(bits, &bernoulli(2 * j)) * &npow / (2 * j as u32);
        let small = term.clone().abs() < tol;
        g += term;
        if small {
            break;
        }
        npow *= &n2;
    }
    Float::with_val(ctx.bits(), g)
}

/// `Li₅(1/2) = Σ 2^-k / k^5`.
pub fn li5_half_series(ctx: &PrecisionContext) -> BigReal {
    let bits = ctx.bits() + 16;
    let mut sum = Float::new(bits);
    let mut p = Float::with_val(bits, 1);
    for k in 1..=(bits + 8) {
        p /= 2u32;
        let k5 = Float::with_val(bits, k).pow(5u32);
        sum += Float::with_val(bits, &p / &k5);
    }
    Float::with_val(ctx.bits(), sum)
}

#[derive(Debug, Clone)]
struct Entry {
    value: BigReal,
}

/// Process-wide `(atom, digits)` → value cache, safe for concurrent use.
#[derive(Debug, Default)]
pub struct ConstantCache {
    map: RwLock<HashMap<(ConstantAtom, u32), Entry>>,
}

pub fn global_cache() -> &'static ConstantCache {
    static CACHE: OnceLock<ConstantCache> = OnceLock::new();
    CACHE.get_or_init(ConstantCache::default)
}

impl ConstantCache {
    pub fn get_or_compute(&self, atom: ConstantAtom, ctx: &PrecisionContext) -> BigReal {
        let key = (atom, ctx.digits());
        if let Some(e) = self.map.read().expect("constant cache poisoned").get(&key) {
            if e.value.prec() >= ctx.bits() {
                return Float::with_val(ctx.bits(), &e.value);
            }
        }
        let value = compute(atom, ctx);
        self.map.write().expect("constant cache poisoned").insert(
            key,
            Entry {
                value: value.clone(),
            },
        );
        value
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("constant cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&self) {
        self.map.write().expect("constant cache poisoned").clear();
    }

    /// Merge records from a cache file. Lines that fail to parse, carry an
    /// unknown tag, or hold fewer significant digits than their declared
    /// `digits` are skipped. Returns the number of records accepted.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut accepted = 0;
        let mut map = self.map.write().expect("constant cache poisoned");
        for line in text.lines() {
            let Some((atom, digits, value)) = parse_record(line) else {
                continue;
            };
            let key = (atom, digits);
            let better = map.get(&key).is_none_or(|e| e.value.prec() < value.prec());
            if better {
                map.insert(key, Entry { value });
            }
            accepted += 1;
        }
        Ok(accepted)
    }

    /// Write every record as `tag digits value`, sorted, via temp file + rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.map.read().expect("constant cache poisoned");
        let mut keys: Vec<_> = map.keys().copied().collect();
        keys.sort();
        let mut out = String::new();
        for key in keys {
            let e = &map[&key];
            out.push_str(&format!(
                "{} {} {}\n",
                key.0.tag(),
                key.1,
                to_decimal(&e.value)
            ));
        }
        drop(map);
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(out.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Significant decimal digits in a mantissa such as `-1.2345e-3`.
fn significant_digits(s: &str) -> usize {
    let mantissa = s.split(['e', 'E']).next().unwrap_or("");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    digits.trim_start_matches('0').len()
}

fn parse_record(line: &str) -> Option<(ConstantAtom, u32, BigReal)> {
    let mut it = line.split_whitespace();
    let atom = ConstantAtom::from_tag(it.next()?)?;
    let digits: u32 = it.next()?.parse().ok()?;
    let text = it.next()?;
    if it.next().is_some() {
        return None;
    }
    let sig = significant_digits(text);
    if sig < digits as usize {
        return None;
    }
    // The stored precision reflects what the text actually carries.
    let bits = bits_for_digits(sig as u32 - 2).max(64);
    let parsed = Float::parse(text).ok()?;
    let value = Float::with_val(bits, parsed);
    value.is_finite().then_some((atom, digits, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &BigReal, b: &BigReal, ctx: &PrecisionContext, slack: u32) -> bool {
        let d = Float::with_val(ctx.bits(), a - b).abs();
        d < ctx.pow10_neg(ctx.digits() - slack)
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), Rational::new());
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(20), Rational::from((-174611, 330)));
    }

    #[test]
    fn zeta_em_matches_mpfr() {
        for digits in [20, 45, 90] {
            let ctx = PrecisionContext::new(digits).unwrap();
            for s in [2u32, 3, 4, 5, 7] {
                let em = zeta_em(s, &ctx);
                let reference = Float::with_val(ctx.bits(), Float::with_val(ctx.bits(), s).zeta());
                assert!(close(&em, &reference, &ctx, 0), "zeta({s}) at {digits}");
            }
        }
    }

    #[test]
    fn even_zetas_from_pi() {
        let ctx = PrecisionContext::new(50).unwrap();
        let z2 = constant(ConstantAtom::Zeta2, &ctx);
        let z4 = constant(ConstantAtom::Zeta4, &ctx);
        assert!(close(&z2, &zeta_em(2, &ctx), &ctx, 2));
        assert!(close(&z4, &zeta_em(4, &ctx), &ctx, 2));
        assert!(z2.to_f64() - 1.6449340668 < 1e-10);
        assert!((z4.to_f64() - 1.0823232337).abs() < 1e-10);
    }

    #[test]
    fn euler_gamma_matches_mpfr() {
        let ctx = PrecisionContext::new(60).unwrap();
        let g = euler_gamma_em(&ctx);
        let reference = Float::with_val(ctx.bits(), rug::float::Constant::Euler);
        assert!(close(&g, &reference, &ctx, 0));
    }

    #[test]
    fn li5_half_value() {
        // Reference digits from an independent 80-digit evaluation.
        let ctx = PrecisionContext::new(60).unwrap();
        let expect = crate::precision::parse_decimal(
            "0.50840057924226870745910884925858994131954112566482164872449779635",
            &ctx,
        )
        .unwrap();
        assert!(close(
            &constant(ConstantAtom::Li5Half, &ctx),
            &expect,
            &ctx,
            0
        ));
    }

    #[test]
    fn precision_monotonicity() {
        let lo = PrecisionContext::new(30).unwrap();
        let hi = PrecisionContext::new(70).unwrap();
        for atom in ConstantAtom::ALL {
            let a = constant(atom, &lo);
            let b = constant(atom, &hi);
            let d = Float::with_val(hi.bits(), &a - &b).abs();
            assert!(d < lo.pow10_neg(lo.digits() - 2), "{atom}");
        }
    }

    #[test]
    fn tags_round_trip() {
        for atom in ConstantAtom::ALL {
            assert_eq!(ConstantAtom::from_tag(atom.tag()), Some(atom));
        }
        assert_eq!(ConstantAtom::zeta(6), None);
        assert_eq!(ConstantAtom::zeta(3), Some(ConstantAtom::Zeta3));
    }

    #[test]
    fn cache_file_round_trip_and_digit_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("constants.txt");
        let cache = ConstantCache::default();
        let ctx = PrecisionContext::new(40).unwrap();
        let z3 = cache.get_or_compute(ConstantAtom::Zeta3, &ctx);
        cache.get_or_compute(ConstantAtom::Li5Half, &ctx);
        cache.save(&path).unwrap();

        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().all(|l| l.split(' ').count() == 3));
        assert!(text.lines().next().unwrap().starts_with("zeta3 40 "));

        let fresh = ConstantCache::default();
        assert_eq!(fresh.load(&path).unwrap(), 2);
        assert_eq!(fresh.get_or_compute(ConstantAtom::Zeta3, &ctx), z3);

        // A truncated record must not satisfy a 40-digit request.
        fs::write(&path, "zeta3 40 1.2020569\nbogus 3 1.0\n").unwrap();
        let strict = ConstantCache::default();
        assert_eq!(strict.load(&path).unwrap(), 0);
        assert!(strict.is_empty());
    }

    #[test]
    fn concurrent_access() {
        let cache = ConstantCache::default();
        let ctx = PrecisionContext::new(30).unwrap();
        std::thread::scope(|s| {
            for _ in 0..4 {
                s.spawn(|| {
                    for atom in ConstantAtom::ALL {
                        cache.get_or_compute(atom, &ctx);
                    }
                });
            }
        });
        assert_eq!(cache.len(), ConstantAtom::ALL.len());
    }
}

//! `aperyv` command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use aperyv_core::constants::{constant, global_cache, ConstantAtom};
use aperyv_core::error::Error;
use aperyv_core::identities::{self, registry, reports_to_json, Status, VerificationReport};
use aperyv_core::precision::{to_decimal, to_decimal_digits, PrecisionContext};
use aperyv_core::pslq::{rediscover, BASIS_LABELS};
use aperyv_core::series::{integral_sum, levin_sum, SeriesSpec};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "aperyv",
    version,
    about = "Verify weight-5 central binomial harmonic series and related integrals"
)]
pub struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 45, value_parser = clap::value_parser!(u32).range(15..=1000))]
    pub digits: u32,
    /// Digits that must agree for PASS.
    #[arg(long, global = true, default_value_t = 30)]
    pub target: u32,
    /// Print JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON document to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List registry entries.
    List,
    /// Verify one identity.
    Verify {
        #[arg(long)]
        id: String,
    },
    /// Verify every identity whose id starts with the filter.
    VerifyAll {
        #[arg(long, default_value = "all")]
        filter: String,
    },
    /// Print the basis constants.
    Constants,
    /// Sum Σ 4^k·H.../(k^n·C(2k,k)).
    Sum {
        /// Harmonic orders, comma separated (may be empty).
        #[arg(long, value_delimiter = ',', default_value = "")]
        orders: Vec<String>,
        #[arg(long = "exp")]
        exponent: u32,
        #[arg(long, value_enum, default_value_t = Method::Integral)]
        method: Method,
        /// Terms handed to the extrapolation.
        #[arg(long, default_value_t = 240)]
        terms: usize,
    },
    /// Recover a `T.*` closed form by integer-relation search.
    Pslq {
        #[arg(long)]
        id: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Levin,
    Integral,
}

struct Outcome {
    text: String,
    json: serde_json::Value,
    code: i32,
}

fn error_code(e: &Error) -> i32 {
    if e.is_numeric_failure() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn cache_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("APERYV_CACHE") {
        return Some(PathBuf::from(p));
    }
    let base = std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
    Some(base.join("aperyv").join("constants.txt"))
}

/// Write `contents` to `path` via a temp file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn short(x: &Option<aperyv_core::precision::BigReal>, sig: usize) -> String {
    x.as_ref()
        .map_or_else(|| "-".to_string(), |v| to_decimal_digits(v, sig))
}

fn report_table(reports: &[VerificationReport]) -> String {
    let mut s = format!(
        "{:<16} {:<8} {:>6} {:<20} {:>8}  {}\n",
        "ID", "STATUS", "DIGITS", "METHOD", "MS", "VALUE"
    );
    for r in reports {
        let sig = (r.digits_agreed + 5).min(r.precision_digits) as usize;
        s.push_str(&format!(
            "{:<16} {:<8} {:>6} {:<20} {:>8}  {}\n",
            r.id,
            r.status.as_str(),
            r.digits_agreed,
            r.method,
            r.elapsed_ms,
            short(&r.lhs, sig)
        ));
        if r.status != Status::Pass {
            s.push_str(&format!("{:<16} rhs = {}\n", "", short(&r.rhs, sig)));
        }
        if let Some(d) = &r.detail {
            s.push_str(&format!("{:<16} {d}\n", ""));
        }
    }
    s
}

fn reports_outcome(reports: Vec<VerificationReport>) -> Outcome {
    let code = if reports.iter().all(|r| r.status == Status::Pass) {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let json = serde_json::from_str(&reports_to_json(&reports)).expect("report json");
    Outcome {
        text: report_table(&reports),
        json,
        code,
    }
}

fn check_target(cli: &Cli) -> Result<(), Error> {
    if cli.target + 10 > cli.digits {
        return Err(Error::Precision(format!(
            "--target {} needs --digits of at least {}",
            cli.target,
            cli.target + 10
        )));
    }
    Ok(())
}

fn list() -> Outcome {
    let mut text = String::new();
    let mut rows = Vec::new();
    for i in registry() {
        let w = i.weight.map_or("-".to_string(), |w| w.to_string());
        text.push_str(&format!(
            "{:<16} {:<20} {:>2}  {}\n",
            i.id,
            i.lhs.method(),
            w,
            i.description
        ));
        rows.push(json!({
            "id": i.id,
            "method": i.lhs.method(),
            "weight": i.weight,
            "description": i.description,
            "dependencies": i.dependencies,
        }));
    }
    Outcome {
        text,
        json: serde_json::Value::Array(rows),
        code: EXIT_OK,
    }
}

fn constants(ctx: &PrecisionContext) -> Outcome {
    let mut text = String::new();
    let mut map = serde_json::Map::new();
    for atom in ConstantAtom::ALL {
        let v = constant(atom, ctx);
        let d = to_decimal_digits(&v, ctx.digits() as usize);
        text.push_str(&format!("{:<12} {d}\n", atom.tag()));
        map.insert(atom.tag().to_string(), json!(to_decimal(&v)));
    }
    Outcome {
        text,
        json: serde_json::Value::Object(map),
        code: EXIT_OK,
    }
}

fn sum(
    cli: &Cli,
    orders: &[String],
    exponent: u32,
    method: Method,
    terms: usize,
    ctx: &PrecisionContext,
) -> Result<Outcome, Error> {
    let orders = orders
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("order {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spec = SeriesSpec::new(&orders, exponent)?;
    let r = match method {
        Method::Integral => integral_sum(&spec, ctx, cli.target.min(ctx.digits() - 5))?,
        Method::Levin => levin_sum(&spec, ctx, terms)?,
    };
    let text = format!(
        "{spec}\n  value    {}\n  method   {}\n  terms    {}\n  err_est  {}\n",
        to_decimal_digits(&r.value, ctx.digits() as usize),
        r.method.name(),
        r.terms_used,
        to_decimal_digits(&r.err_estimate, 3),
    );
    let json = json!({
        "series": spec.to_string(),
        "orders": orders,
        "exponent": exponent,
        "value": to_decimal(&r.value),
        "method": r.method.name(),
        "terms_used": r.terms_used,
        "err_estimate": to_decimal(&r.err_estimate),
        "precision_digits": ctx.digits(),
    });
    Ok(Outcome {
        text,
        json,
        code: EXIT_OK,
    })
}

fn pslq_cmd(id: &str, ctx: &PrecisionContext) -> Result<Outcome, Error> {
    let r = rediscover(id, ctx)?;
    let fmt = |v: &[rug::Integer]| {
        v.iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let labels = std::iter::once("S")
        .chain(BASIS_LABELS)
        .collect::<Vec<_>>()
        .join(", ");
    let mut text = format!("{id} on ({labels})\n");
    match &r.relation {
        Some(rel) => {
            text.push_str(&format!("relation ({})\n", fmt(&rel.coeffs)));
            text.push_str(&format!(
                "residual {}\n",
                to_decimal_digits(&rel.residual, 3)
            ));
        }
        None => text.push_str(&format!(
            "no relation with coefficients below 10^{}\n",
            r.max_coeff_digits
        )),
    }
    text.push_str(if r.matched { "MATCH\n" } else { "NO MATCH\n" });
    let json = json!({
        "id": id,
        "relation": r.relation.as_ref().map(|rel| rel.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        "residual": r.relation.as_ref().map(|rel| to_decimal(&rel.residual)),
        "expected": r.expected.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "match": r.matched,
        "precision_digits": ctx.digits(),
    });
    Ok(Outcome {
        text,
        json,
        code: if r.matched { EXIT_OK } else { EXIT_FAIL },
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome, Error> {
    let ctx = PrecisionContext::new(cli.digits)?;
    match &cli.command {
        Command::List => Ok(list()),
        Command::Verify { id } => {
            identities::lookup(id)?;
            check_target(cli)?;
            Ok(reports_outcome(vec![identities::verify(
                id, cli.target, &ctx,
            )?]))
        }
        Command::VerifyAll { filter } => {
            check_target(cli)?;
            Ok(reports_outcome(identities::verify_all(
                filter, cli.target, &ctx,
            )?))
        }
        Command::Constants => Ok(constants(&ctx)),
        Command::Sum {
            orders,
            exponent,
            method,
            terms,
        } => sum(cli, orders, *exponent, *method, *terms, &ctx),
        Command::Pslq { id } => pslq_cmd(id, &ctx),
    }
}

/// Run with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let cache = cache_path();
    if let Some(p) = &cache {
        if let Err(e) = global_cache().load(p) {
            let _ = writeln!(err, "warning: constant cache not loaded: {e}");
        }
    }
    let code = match dispatch(&cli) {
        Ok(o) => {
            let doc = serde_json::to_string_pretty(&o.json).expect("json") + "\n";
            let _ = if cli.json {
                out.write_all(doc.as_bytes())
            } else {
                out.write_all(o.text.as_bytes())
            };
            match &cli.out {
                Some(path) => match write_atomic(path, &doc) {
                    Ok(()) => o.code,
                    Err(e) => {
                        let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                        EXIT_USAGE
                    }
                },
                None => o.code,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_code(&e)
        }
    };
    if let Some(p) = &cache {
        if let Err(e) = global_cache().save(p) {
            let _ = writeln!(err, "warning: constant cache not saved: {e}");
        }
    }
    code
}

/// Run against stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> (i32, String, String) {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var("APERYV_CACHE", dir.path().join("c.txt"));
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(
            std::iter::once("aperyv").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors() {
        assert_eq!(go(&["verify", "--id", "NOPE"]).0, EXIT_USAGE);
        assert_eq!(go(&["--digits", "5", "list"]).0, EXIT_USAGE);
        assert_eq!(
            go(&["verify", "--id", "L4.i", "--digits", "30", "--target", "25"]).0,
            EXIT_USAGE
        );
        assert_eq!(go(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(go(&["sum", "--orders", "0", "--exp", "2"]).0, EXIT_USAGE);
    }

    #[test]
    fn list_names_every_entry() {
        let (code, out, _) = go(&["list"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), registry().len());
    }
}

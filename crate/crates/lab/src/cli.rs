//! The `qmf` command line.
//!
//! Failures print one line to stderr of the form
//! `error: kind=<kind> message="<text>"` and exit with code 2; a failed
//! check exits with code 1.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qmf_core::cf::{backward_denominators, bar_invert, cf_expand, continuants, dedekind_sum, sigma_phase};
use qmf_core::dist::{ecdf, ks_distance, EmpiricalSample, Normalization, PushforwardConfig, QuotientLaw, SampleMeta, SampleSource};
use qmf_core::forms::{kontsevich_phistar, Form};
use qmf_core::{Complex64, Rational};
use serde_json::json;

use crate::checks::{self, Context};
use crate::compute::{ecdf_table, pushforward, scan};
use crate::config::{Config, KS_FIXTURE};
use crate::figures;
use crate::io::{fmt_f64, read_sample_values, read_sidecar, write_sample, write_sidecar, ECDF_SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qmf", version, about = "Quantum modular form experiments: evaluation, scans, figure data and checks")]
struct Cli {
    /// Configuration file overriding the built-in parameter sets.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continued fraction data of a rational: expansion, u and v
    /// sequences, x̄, σ and the Dedekind sum.
    Cf {
        /// `p/q` or an integer.
        x: String,
    },
    /// Evaluate a form at a rational point.
    Eval {
        /// cotangent, kontsevich, eichler or akd.
        form: String,
        x: String,
        /// Form parameters as `key=value`, e.g. `a=-0.5+0.51i`.
        params: Vec<String>,
        #[arg(long, value_enum, default_value_t = Kind::Value)]
        kind: Kind,
    },
    /// Values of a form at every `b/q` with `gcd(b, q) = 1`, written as a
    /// sample file.
    Scan {
        form: String,
        params: Vec<String>,
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum, default_value_t = Norm::Raw)]
        norm: Norm,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample of the extension at random irrational points.
    Pushforward {
        form: String,
        params: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 80)]
        depth: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Law::Lebesgue)]
        law: Law,
        #[arg(long)]
        out: PathBuf,
    },
    /// Empirical CDF of a sample projected on the direction `angle`.
    Ecdf {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Two-sample Kolmogorov–Smirnov distance of two sample files.
    Ks {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
    },
    /// Figure data as CSV plus SVG views.
    Figure {
        /// fig1, fig3a, fig3b, fig4 or fig4:<panel>.
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a check suite: cf, special, engine, forms, dist or all.
    Check {
        #[arg(default_value = "all")]
        suite: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    /// `f(x)`.
    Value,
    /// The period function `h(x)`.
    H,
    /// `f★(x)` (cotangent and kontsevich).
    Star,
    /// `c̃_a(x)` (cotangent).
    Tilde,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Norm {
    Raw,
    Qk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Law {
    Lebesgue,
    GaussKuzmin,
}

/// A failure with its category for the error line.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn usage(m: impl Into<String>) -> Self {
        Failure { kind: "usage", message: m.into() }
    }
    fn io(m: impl Into<String>) -> Self {
        Failure { kind: "io", message: m.into() }
    }

    pub fn line(&self) -> String {
        format!("error: kind={} message={}", self.kind, json!(self.message))
    }
}

impl From<qmf_core::Error> for Failure {
    fn from(e: qmf_core::Error) -> Self {
        let kind = match e {
            qmf_core::Error::Domain(_) => "domain",
            qmf_core::Error::Pole(_) => "pole",
            qmf_core::Error::Truncation { .. } => "truncation",
            qmf_core::Error::UnknownForm(_) => "usage",
        };
        Failure { kind, message: e.to_string() }
    }
}

/// Runs the tool on `argv` (including the program name), writing to
/// stdout and stderr, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            let text = e.to_string();
            eprint!("{text}");
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", Failure::usage(first).line());
            return EXIT_USAGE;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(cli, &mut out) {
        Ok(code) => code,
        Err(f) => {
            let _ = out.flush();
            eprintln!("{}", f.line());
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut config = Config::defaults();
    if let Some(path) = &cli.config {
        config = config.merged(Config::load(path).map_err(Failure::usage)?);
    }
    let w = |r: std::io::Result<()>| r.map_err(|e| Failure::io(e.to_string()));
    match cli.command {
        Command::Cf { x } => {
            let x = parse_rational(&x)?;
            w(cf_report(&x, out))?;
        }
        Command::Eval { form, x, params, kind } => {
            let form = build_form(&form, &params)?;
            let x = parse_rational(&x)?;
            let v = evaluate(&form, &x, kind)?;
            w(writeln!(out, "re={} im={}", fmt_f64(v.re), fmt_f64(v.im)))?;
        }
        Command::Scan { form, params, q, norm, out: path } => {
            let form = build_form(&form, &params)?;
            let norm = match norm {
                Norm::Raw => Normalization::Raw,
                Norm::Qk => Normalization::QPowMinusK,
            };
            let sample = scan(&form, q, norm)?;
            write_sample(&path, &sample, &[]).map_err(Failure::io)?;
            w(writeln!(out, "wrote {} values to {}", sample.len(), path.display()))?;
        }
        Command::Pushforward { form, params, n, seed, depth, tol, law, out: path } => {
            let form = build_form(&form, &params)?;
            let law = match law {
                Law::Lebesgue => QuotientLaw::Lebesgue,
                Law::GaussKuzmin => QuotientLaw::GaussKuzmin,
            };
            let cfg = PushforwardConfig { n, seed, max_depth: depth, tol, law, ..Default::default() };
            let p = pushforward(&form, &cfg)?;
            let extra = [("failures", json!(p.failures)), ("capped", json!(p.capped))];
            write_sample(&path, &p.sample, &extra).map_err(Failure::io)?;
            w(writeln!(
                out,
                "wrote {} values to {} ({} non-converged, {} capped quotients)",
                p.sample.len(),
                path.display(),
                p.failures,
                p.capped
            ))?;
        }
        Command::Ecdf { input, angle, out: path } => {
            let sample = load_sample(&input, Some(angle))?;
            let table = ecdf_table(&sample, angle)?;
            table.write(&path).map_err(Failure::io)?;
            let mut meta = read_sidecar(&input).map_err(Failure::io)?.unwrap_or_default();
            meta.insert("schema".into(), json!(ECDF_SCHEMA));
            meta.insert("angle".into(), json!(angle));
            meta.insert("input".into(), json!(input.display().to_string()));
            write_sidecar(&path, &meta).map_err(Failure::io)?;
            w(writeln!(out, "wrote {} jump points to {}", table.rows.len(), path.display()))?;
        }
        Command::Ks { a, b, angle } => {
            let fa = ecdf(&load_sample(&a, None)?, angle)?;
            let fb = ecdf(&load_sample(&b, None)?, angle)?;
            w(writeln!(out, "ks={}", fmt_f64(ks_distance(&fa, &fb))))?;
        }
        Command::Figure { name, out: dir } => {
            for fig in figures::build(&name, &config).map_err(Failure::usage)? {
                for path in fig.write(&dir).map_err(Failure::io)? {
                    w(writeln!(out, "wrote {}", path.display()))?;
                }
            }
        }
        Command::Check { suite } => {
            let ids = checks::suite(&suite).ok_or_else(|| {
                Failure::usage(format!("unknown suite {suite:?}; expected one of {}", checks::suite_names().join(", ")))
            })?;
            let ks = Config::parse(KS_FIXTURE).expect("KS fixture parses");
            let ctx = Context { config, ks };
            let mut failed = 0;
            for id in &ids {
                let o = checks::run(*id, &ctx);
                failed += usize::from(!o.passed);
                w(writeln!(out, "{}", o.line()))?;
            }
            w(writeln!(out, "{suite}: {} passed, {failed} failed", ids.len() - failed))?;
            return Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED });
        }
    }
    Ok(EXIT_OK)
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    s.parse().map_err(|e: qmf_core::Error| Failure::usage(format!("bad rational {s:?}: {e}")))
}

fn build_form(id: &str, params: &[String]) -> Result<Form, Failure> {
    let pairs: Vec<(&str, &str)> = params
        .iter()
        .map(|p| p.split_once('=').ok_or_else(|| Failure::usage(format!("expected key=value, got {p:?}"))))
        .collect::<Result<_, _>>()?;
    Ok(Form::from_id(id, &pairs)?)
}

fn evaluate(form: &Form, x: &Rational, kind: Kind) -> Result<Complex64, Failure> {
    match (kind, form) {
        (Kind::Value, _) => Ok(form.eval(x)?),
        (Kind::H, Form::Akd { .. }) => Err(Failure::usage("akd has no period function")),
        (Kind::H, _) => {
            if x.is_zero() {
                return Err(Failure { kind: "domain", message: "h is not defined at 0".into() });
            }
            Ok(form.spec()?.period(x))
        }
        (Kind::Star, Form::Kontsevich) => Ok(kontsevich_phistar(x)?),
        (Kind::Star, Form::Cotangent(c)) => {
            let bar = bar_invert(x)?;
            let q = x.den().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
            Ok(Complex64::new(q, 0.0).powc(-c.weight()) * c.c_rational(&bar)?)
        }
        (Kind::Tilde, Form::Cotangent(c)) => Ok(c.c_tilde(x)?),
        (Kind::Star, _) => Err(Failure::usage("--kind star needs cotangent or kontsevich")),
        (Kind::Tilde, _) => Err(Failure::usage("--kind tilde needs cotangent")),
    }
}

fn load_sample(path: &Path, angle: Option<f64>) -> Result<EmpiricalSample, Failure> {
    let values = read_sample_values(path).map_err(|m| Failure { kind: "input", message: m })?;
    let form = read_sidecar(path)
        .ok()
        .flatten()
        .and_then(|m| m.get("form").and_then(|f| f.as_str().map(str::to_string)))
        .unwrap_or_default();
    let meta = SampleMeta { form, source: SampleSource::Scan { q: 0, norm: Normalization::Raw }, angle };
    Ok(EmpiricalSample { values, meta })
}

fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

fn cf_report(x: &Rational, out: &mut dyn Write) -> std::io::Result<()> {
    let cf = cf_expand(x);
    writeln!(out, "x = {x}")?;
    writeln!(out, "cf = [{};{}]", cf.b0, join(&cf.quotients))?;
    writeln!(out, "u = {}", join(&backward_denominators(&cf).0))?;
    writeln!(out, "v = {}", join(&continuants(&cf).0))?;
    if x.is_positive() && *x <= 1 {
        let bar = bar_invert(x).expect("0 < x ≤ 1");
        let sigma = sigma_phase(x).expect("0 < x ≤ 1");
        writeln!(out, "bar = {bar}")?;
        writeln!(out, "sigma = {sigma}")?;
    }
    writeln!(out, "s = {}", dedekind_sum(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capture(args: &[&str]) -> (Result<i32, Failure>, String) {
        let cli = Cli::try_parse_from(std::iter::once("qmf").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let r = execute(cli, &mut buf);
        (r, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn cf_example() {
        let (r, text) = capture(&["cf", "7/17"]);
        assert_eq!(r.unwrap(), 0);
        assert!(text.contains("cf = [0;2,2,3]\n"), "{text}");
        assert!(text.contains("u = 17,7,3,1\n"), "{text}");
        assert!(text.contains("bar = 5/17\n"), "{text}");
    }

    #[test]
    fn eval_kinds() {
        let (r, text) = capture(&["eval", "kontsevich", "1/2"]);
        assert_eq!(r.unwrap(), 0);
        let want = Complex64::from_polar(3.0, std::f64::consts::PI / 24.0);
        let nums: Vec<f64> =
            text.trim().split(' ').map(|kv| kv.split_once('=').unwrap().1.parse().unwrap()).collect();
        assert!((nums[0] - want.re).abs() < 1e-12 && (nums[1] - want.im).abs() < 1e-12);
        assert!(capture(&["eval", "akd", "0", "--kind", "h"]).0.is_err());
        assert!(capture(&["eval", "cotangent", "1/3", "a"]).0.is_err());
        let (r, _) = capture(&["eval", "cotangent", "1/3", "a=0.5", "--kind", "tilde"]);
        assert_eq!(r.unwrap(), 0);
    }

    #[test]
    fn error_line_is_machine_readable() {
        let f = Failure::usage("bad \"x\"");
        assert_eq!(f.line(), r#"error: kind=usage message="bad \"x\"""#);
    }
}

//! The concrete families: cotangent sums, the Kontsevich function, Eichler
//! integrals of level-one cusp forms and Zagier's `A_{k,D}`.

pub mod akd;
pub mod cotangent;
pub mod eichler;
pub mod kontsevich;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;

use num_complex::Complex64;

use crate::engine::QmfSpec;
use crate::error::{domain, Error, Result};
use crate::rational::Rational;

pub use akd::{a_kd, akd_depth_for, akd_divisor_side, akd_tail_bound, AkdValue, BRange};
pub use cotangent::{cotangent_c, cotangent_c_tilde, cotangent_ext_pos, cotangent_h, rho, CotTable, Cotangent};
pub use eichler::{
    delta_coefficients, eichler_tilde, eval_polynomial, fit_polynomial, EichlerIntegral, Truncated, DELTA_TERMS,
};
pub use kontsevich::{
    kontsevich_h, kontsevich_phi, kontsevich_phi_direct, kontsevich_phistar, kontsevich_spec, KontsevichScan,
};

/// Truncation tolerance used when an Eichler integral is evaluated through
/// [`Form`].
pub const EICHLER_TOL: f64 = 1e-12;

/// One member of a family, with its parameters fixed.
#[derive(Clone, Debug)]
pub enum Form {
    /// `c_a`; its quantum modular completion is `c̃_a`.
    Cotangent(Arc<Cotangent>),
    /// `φ`.
    Kontsevich,
    /// `g̃` for a level-one cusp form.
    Eichler(EichlerIntegral),
    /// `A_{k,D}` summed to `depth`.
    Akd { k: u32, d: i64, range: BRange, depth: u64 },
}

impl Form {
    /// Builds a form from an identifier and `key=value` parameters:
    ///
    /// * `cotangent` with `a` (complex, e.g. `-0.5+0.51i`),
    /// * `kontsevich`,
    /// * `eichler` (the discriminant function `Δ`),
    /// * `akd` with `k` (default 5), `D` (default 5), `b` (`all` or
    ///   `nonneg`, default `all`) and `tol` (default `1e-10`).
    pub fn from_id(id: &str, params: &[(&str, &str)]) -> Result<Self> {
        let get = |key: &str| params.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| *v);
        for (key, _) in params {
            let known: &[&str] = match id {
                "cotangent" => &["a"],
                "akd" => &["k", "d", "b", "tol"],
                _ => &[],
            };
            if !known.iter().any(|k| k.eq_ignore_ascii_case(key)) {
                return Err(Error::UnknownForm(format!("parameter {key} for {id}")));
            }
        }
        match id {
            "cotangent" => {
                let a = get("a").ok_or_else(|| Error::UnknownForm("cotangent needs a=<complex>".into()))?;
                Ok(Form::Cotangent(Arc::new(Cotangent::new(parse_complex(a)?)?)))
            }
            "kontsevich" => Ok(Form::Kontsevich),
            "eichler" => Ok(Form::Eichler(EichlerIntegral::delta())),
            "akd" => {
                let k = parse_num::<u32>(get("k").unwrap_or("5"))?;
                let d = parse_num::<i64>(get("d").unwrap_or("5"))?;
                let tol = parse_num::<f64>(get("tol").unwrap_or("1e-10"))?;
                let range = match get("b").unwrap_or("all") {
                    "all" => BRange::All,
                    "nonneg" => BRange::NonNegative,
                    other => return Err(Error::UnknownForm(format!("b-range {other}"))),
                };
                Ok(Form::Akd { k, d, range, depth: akd_depth_for(k, d, tol)? })
            }
            other => Err(Error::UnknownForm(other.to_string())),
        }
    }

    /// Short description, e.g. `cotangent(a=0.5)`.
    pub fn id(&self) -> String {
        match self {
            Form::Cotangent(c) => format!("cotangent(a={})", format_complex(c.a())),
            Form::Kontsevich => "kontsevich".into(),
            Form::Eichler(e) => format!("eichler(k={})", e.cusp_weight()),
            Form::Akd { k, d, range, .. } => format!("akd(k={k},D={d},b={range:?})"),
        }
    }

    /// Weight of the quantum modular form behind the family.
    pub fn weight(&self) -> Complex64 {
        match self {
            Form::Cotangent(c) => c.weight(),
            Form::Kontsevich => Complex64::new(1.5, 0.0),
            Form::Eichler(e) => e.weight(),
            Form::Akd { k, .. } => Complex64::new(-2.0 * *k as f64, 0.0),
        }
    }

    /// The form's value at `x`: `c_a`, `φ`, `g̃` or `A_{k,D}`.
    pub fn eval(&self, x: &Rational) -> Result<Complex64> {
        match self {
            Form::Cotangent(c) => c.c_rational(x),
            Form::Kontsevich => kontsevich_phi(x),
            Form::Eichler(e) => Ok(e.eval(x, EICHLER_TOL)?.value),
            Form::Akd { k, d, range, depth } => Ok(Complex64::new(a_kd(*k, *d, x, *depth, *range)?.value, 0.0)),
        }
    }

    /// Engine spec of the quantum modular form (`c̃_a` for cotangent sums).
    pub fn spec(&self) -> Result<QmfSpec> {
        match self {
            Form::Cotangent(c) => Ok(c.spec()),
            Form::Kontsevich => Ok(kontsevich_spec()),
            Form::Eichler(e) => e.spec(EICHLER_TOL),
            Form::Akd { .. } => Err(domain("no engine spec for A_{k,D}")),
        }
    }
}

fn parse_num<T: core::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| domain(format!("cannot parse {s:?}")))
}

/// Parses `1.5`, `-0.5+0.51i`, `2i`, `-i` and the like.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || domain(format!("cannot parse complex number {s:?}"));
    let Some(body) = s.strip_suffix('i') else {
        return parse_num::<f64>(s).map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split before the sign that starts the imaginary part, skipping the
    // leading sign and exponent signs.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_num::<f64>(t).map_err(|_| bad())?,
    };
    let re = parse_num::<f64>(re).map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Inverse of [`parse_complex`] for display.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

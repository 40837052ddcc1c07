//! Figure data: CSV tables (authoritative) and SVG views.
//!
//! * `fig1`: `φ★(x)` for `0 < x ≤ 1`, `den(x) ≤ 101`.
//! * `fig3a`, `fig3b`: empirical CDFs of `c_{-2}(a/q)` and
//!   `q^{-3/2} c_{1/2}(a/q)` at `q = 5000`.
//! * `fig4:<panel>`: `c_a` at `n` points of denominator `q`; the raw values
//!   for `Re(a) < -1`, otherwise `c_a★(b/q) = q^{-1-a} c_a(b̄/q)`.
//!
//! Parameters come from the configuration (see `config/qmf.conf`).

use std::path::{Path, PathBuf};

use qmf_core::cf::bar_invert;
use qmf_core::dist::Normalization;
use qmf_core::forms::{format_complex, parse_complex, Cotangent, Form, KontsevichScan};
use qmf_core::{Complex64, Rational};

use crate::compute::{ecdf_table, scan};
use crate::config::Config;
use crate::io::Table;
use crate::parallel::par_map;
use crate::svg::{Plot, Series, PALETTE};

pub const FIGURE_SCHEMA: &str = "qmf-figure/1";

pub struct Figure {
    pub name: String,
    pub table: Table,
    pub plots: Vec<(String, Plot)>,
}

impl Figure {
    /// Writes `<name>.csv` and one `.svg` per plot into `dir`; returns the
    /// paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, String> {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let stem = self.name.replace(':', "_");
        let csv = dir.join(format!("{stem}.csv"));
        self.table.write(&csv)?;
        let mut written = vec![csv];
        for (suffix, plot) in &self.plots {
            let path = dir.join(format!("{stem}{suffix}.svg"));
            std::fs::write(&path, plot.render()).map_err(|e| format!("{}: {e}", path.display()))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Figure names known to the configuration, in a fixed order.
pub fn available(cfg: &Config) -> Vec<String> {
    let mut names = vec!["fig1".to_string(), "fig3a".into(), "fig3b".into()];
    names.extend(cfg.sections_with_prefix("fig4:"));
    names
}

/// `fig4` expands to all of its panels.
pub fn build(name: &str, cfg: &Config) -> Result<Vec<Figure>, String> {
    match name {
        "fig1" => Ok(vec![fig1(cfg.require("fig1.max_den")?)?]),
        "fig3a" | "fig3b" => Ok(vec![fig3(name, cfg)?]),
        "fig4" => cfg.sections_with_prefix("fig4:").iter().map(|p| fig4(p, cfg)).collect(),
        p if p.starts_with("fig4:") => {
            if cfg.section(p).is_empty() {
                return Err(format!("no panel {p} in the configuration"));
            }
            Ok(vec![fig4(p, cfg)?])
        }
        other => Err(format!("unknown figure {other:?}; expected one of {}", available(cfg).join(", "))),
    }
}

fn fig1(max_den: u64) -> Result<Figure, String> {
    if max_den == 0 {
        return Err("fig1.max_den must be positive".into());
    }
    let dens: Vec<u64> = (1..=max_den).collect();
    let per_den = par_map(&dens, |&q| -> Result<Vec<(u64, u64, Complex64)>, String> {
        let scan = KontsevichScan::new(q).map_err(|e| e.to_string())?;
        (1..=q)
            .filter(|&a| num_gcd(a, q) == 1)
            .map(|a| scan.phistar(a as i64).map(|v| (a, q, v)).map_err(|e| e.to_string()))
            .collect()
    });
    let mut pts = Vec::new();
    for r in per_den {
        pts.extend(r?);
    }
    pts.sort_by(|u, v| (u.0 * v.1).cmp(&(v.0 * u.1)));
    let mut table = Table::new(FIGURE_SCHEMA, &["p", "q", "x", "re", "im"]);
    for &(a, q, v) in &pts {
        table.push(vec![a as f64, q as f64, a as f64 / q as f64, v.re, v.im]);
    }
    let xs = |f: fn(&Complex64) -> f64| pts.iter().map(|(a, q, v)| (*a as f64 / *q as f64, f(v))).collect();
    let title = format!("Kontsevich φ★(x), den(x) ≤ {max_den}");
    let graph = Plot::new(&title, "x", "φ★(x)")
        .with(Series::Scatter { label: "Re".into(), points: xs(|v| v.re), color: PALETTE[0], radius: 1.2 })
        .with(Series::Scatter { label: "Im".into(), points: xs(|v| v.im), color: PALETTE[1], radius: 1.2 });
    let plane = Plot::new(&title, "Re φ★", "Im φ★").with(Series::Scatter {
        label: String::new(),
        points: pts.iter().map(|(_, _, v)| (v.re, v.im)).collect(),
        color: PALETTE[0],
        radius: 1.0,
    });
    Ok(Figure { name: "fig1".into(), table, plots: vec![(String::new(), graph), ("_plane".into(), plane)] })
}

fn fig3(name: &str, cfg: &Config) -> Result<Figure, String> {
    let a: String = cfg.require(&format!("{name}.a"))?;
    let q: u64 = cfg.require(&format!("{name}.q"))?;
    let norm = match cfg.require::<String>(&format!("{name}.norm"))?.as_str() {
        "raw" => Normalization::Raw,
        "qk" => Normalization::QPowMinusK,
        other => return Err(format!("{name}.norm must be raw or qk, got {other}")),
    };
    let form = Form::from_id("cotangent", &[("a", &a)]).map_err(|e| e.to_string())?;
    let sample = scan(&form, q, norm).map_err(|e| e.to_string())?;
    let table = ecdf_table(&sample, 0.0).map_err(|e| e.to_string())?;
    let scale = if norm == Normalization::Raw { String::new() } else { format!("q^(-{}) ", format_complex(form.weight())) };
    let plot = Plot {
        y_range: Some((-0.02, 1.02)),
        ..Plot::new(&format!("CDF of {scale}c_a(b/q), a = {a}, q = {q}"), "t", "F(t)")
    }
    .with(Series::Step { label: String::new(), points: table.rows.iter().map(|r| (r[0], r[1])).collect(), color: PALETTE[0] });
    Ok(Figure { name: name.into(), table, plots: vec![(String::new(), plot)] })
}

/// `n` residues spread evenly over `(0, q)`, each moved up to the next one
/// coprime to `q`.
fn spread_residues(q: u64, n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..n)
        .filter_map(|j| {
            let mut b = (((2 * j + 1) as u128 * q as u128) / (2 * n as u128)).max(1) as u64;
            while b < q && num_gcd(b, q) != 1 {
                b += 1;
            }
            (b < q || q == 1).then_some(b)
        })
        .collect();
    out.dedup();
    out
}

fn fig4(panel: &str, cfg: &Config) -> Result<Figure, String> {
    let a_text: String = cfg.require(&format!("{panel}.a"))?;
    let q: u64 = cfg.require(&format!("{panel}.q"))?;
    let n: u64 = cfg.require(&format!("{panel}.n"))?;
    if q < 2 || n == 0 {
        return Err(format!("{panel}: need q ≥ 2 and n ≥ 1"));
    }
    let a = parse_complex(&a_text).map_err(|e| e.to_string())?;
    let cot = Cotangent::new(a).map_err(|e| e.to_string())?;
    let table_q = cot.table(q).map_err(|e| e.to_string())?;
    let k = cot.weight();
    let raw = k.re < 0.0;
    let scale = Complex64::new(q as f64, 0.0).powc(-k);
    let bs = spread_residues(q, n);
    let values = par_map(&bs, |&b| -> Result<Complex64, String> {
        if raw {
            return Ok(cot.c_with_table(&table_q, b as i64));
        }
        let x = Rational::new(b, q).map_err(|e| e.to_string())?;
        let bar = bar_invert(&x).map_err(|e| e.to_string())?;
        let bb = bar.to_i64_pair().expect("small numerator").0;
        Ok(scale * cot.c_with_table(&table_q, bb))
    });
    let mut table = Table::new(FIGURE_SCHEMA, &["b", "q", "x", "re", "im"]);
    let mut re_pts = Vec::with_capacity(bs.len());
    let mut im_pts = Vec::with_capacity(bs.len());
    for (&b, v) in bs.iter().zip(values) {
        let v = v?;
        let x = b as f64 / q as f64;
        table.push(vec![b as f64, q as f64, x, v.re, v.im]);
        re_pts.push((x, v.re));
        im_pts.push((x, v.im));
    }
    let what = if raw { "c_a(x)" } else { "c_a★(x)" };
    let title = format!("{what}, (a, q, N) = ({}, {q}, {n})", format_complex(a));
    let mut plot = Plot::new(&title, "x", &format!("Re {what}"))
        .with(Series::Scatter { label: String::new(), points: re_pts, color: PALETTE[0], radius: 0.8 });
    plot.x_range = Some((0.0, 1.0));
    let mut plots = vec![(String::new(), plot)];
    if a.im != 0.0 {
        let mut im = Plot::new(&title, "x", &format!("Im {what}"))
            .with(Series::Scatter { label: String::new(), points: im_pts, color: PALETTE[1], radius: 0.8 });
        im.x_range = Some((0.0, 1.0));
        plots.push(("_im".into(), im));
    }
    Ok(Figure { name: panel.into(), table, plots })
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residues_are_coprime_and_spread() {
        let bs = spread_residues(10, 4);
        assert_eq!(bs, vec![1, 3, 7, 9]);
        assert!(spread_residues(24001, 3000).iter().all(|&b| num_gcd(b, 24001) == 1 && b < 24001));
        assert_eq!(spread_residues(24001, 3000).len(), 3000);
    }

    #[test]
    fn small_figures() {
        let cfg = Config::parse("[fig1]\nmax_den = 5\n[fig4:t]\na = 1.5\nq = 7\nn = 3\n[fig4:u]\na = -3.2\nq = 7\nn = 5")
            .unwrap();
        let f = build("fig1", &cfg).unwrap().remove(0);
        // φ(x) for den ≤ 5 in (0, 1]: 1 + 1 + 2 + 2 + 4 points.
        assert_eq!(f.table.rows.len(), 10);
        let last = f.table.rows.last().unwrap();
        assert_eq!((last[0], last[1]), (1.0, 1.0));
        let all = build("fig4", &cfg).unwrap();
        assert_eq!(all.len(), 2);
        // c★(b/q) = q^{-k} c(b̄/q): compare with the direct sum.
        let t = &all[0].table;
        for row in &t.rows {
            let (b, q) = (row[0] as i64, row[1] as u64);
            let bar = bar_invert(&Rational::new(b, q).unwrap()).unwrap().to_i64_pair().unwrap().0;
            let direct = qmf_core::forms::cotangent_c(Complex64::new(1.5, 0.0), bar, q).unwrap() * (q as f64).powf(-2.5);
            assert!((direct.re - row[3]).abs() < 1e-12);
        }
        assert_eq!(all[1].table.rows.len(), 5);
        assert!(build("fig9", &cfg).is_err());
        assert!(build("fig4:zz", &cfg).is_err());
    }
}

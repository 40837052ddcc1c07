//! Minimal SVG 1.1 writer for scatter and step plots.
//!
//! Coordinates are printed with a fixed number of decimals so the output is
//! byte-for-byte reproducible.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub const PALETTE: [&str; 4] = ["#1f5fa8", "#c23b22", "#2a8a3e", "#7a4a9c"];

#[derive(Clone, Debug)]
pub enum Series {
    /// Disconnected points.
    Scatter { label: String, points: Vec<(f64, f64)>, color: &'static str, radius: f64 },
    /// A right-continuous step function through the given jump points,
    /// extended flat to the edges of the plot.
    Step { label: String, points: Vec<(f64, f64)>, color: &'static str },
}

impl Series {
    fn points(&self) -> &[(f64, f64)] {
        match self {
            Series::Scatter { points, .. } | Series::Step { points, .. } => points,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Fixed `(min, max)` ranges; derived from the data when absent.
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
            x_range: None,
            y_range: None,
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn data_range(&self, pick: impl Fn(&(f64, f64)) -> f64) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in self.series.iter().flat_map(|s| s.points().iter().map(&pick)).filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-300 {
            return (lo - 0.5, hi + 0.5);
        }
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self.x_range.unwrap_or_else(|| self.data_range(|p| p.0));
        let (y0, y1) = self.y_range.unwrap_or_else(|| self.data_range(|p| p.1));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333" stroke-width="1"/>"##
        );

        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 18.0,
                tick_label(t, x1 - x0)
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
                LEFT - 5.0,
                LEFT - 8.0,
                y + 4.0,
                tick_label(t, y1 - y0)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let _ = writeln!(
            s,
            r#"<clipPath id="plot-area"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>"#
        );
        let _ = writeln!(s, r#"<g clip-path="url(#plot-area)">"#);
        for series in &self.series {
            match series {
                Series::Scatter { points, color, radius, .. } => {
                    let _ = writeln!(s, r#"<g fill="{color}">"#);
                    for &(x, y) in points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}"/>"#, sx(x), sy(y));
                    }
                    let _ = writeln!(s, "</g>");
                }
                Series::Step { points, color, .. } => {
                    let pts: Vec<&(f64, f64)> = points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
                    if pts.is_empty() {
                        continue;
                    }
                    // Starts at level 0, as an empirical CDF does.
                    let mut d = format!("M{:.2},{:.2}", sx(x0), sy(0.0f64.clamp(y0, y1)));
                    for &&(x, y) in &pts {
                        let _ = write!(d, " H{:.2} V{:.2}", sx(x), sy(y));
                    }
                    let _ = write!(d, " H{:.2}", sx(x1));
                    let _ = writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#);
                }
            }
        }
        let _ = writeln!(s, "</g>");

        let labelled: Vec<(&str, &str)> = self
            .series
            .iter()
            .filter_map(|se| match se {
                Series::Scatter { label, color, .. } | Series::Step { label, color, .. } if !label.is_empty() => {
                    Some((label.as_str(), *color))
                }
                _ => None,
            })
            .collect();
        for (i, (label, color)) in labelled.iter().enumerate() {
            let y = TOP + 16.0 + 16.0 * i as f64;
            let x = LEFT + pw - 140.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{color}"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
                y - 9.0,
                x + 15.0,
                y,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Ticks at multiples of 1, 2 or 5 times a power of ten, about six of them.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Vec::new();
    }
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(t: f64, span: f64) -> String {
    let decimals = (-(span / 6.0).log10().floor()).max(0.0) as usize + 1;
    let s = format!("{t:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_choice() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(-3.0, 3.0), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!(ticks(1.0, 1.0).is_empty());
        assert_eq!(tick_label(0.6000000000000001, 1.0), "0.6");
        assert_eq!(tick_label(-0.0, 1.0), "0");
    }

    #[test]
    fn render_is_well_formed_and_deterministic() {
        let plot = Plot::new("a < b", "x", "y")
            .with(Series::Scatter { label: "pts".into(), points: vec![(0.0, 1.0), (1.0, f64::NAN)], color: PALETTE[0], radius: 1.5 })
            .with(Series::Step { label: String::new(), points: vec![(0.0, 0.5), (1.0, 1.0)], color: PALETTE[1] });
        let a = plot.render();
        assert_eq!(a, plot.render());
        assert!(a.starts_with("<?xml") && a.ends_with("</svg>\n"));
        assert!(a.contains("a &lt; b"));
        assert_eq!(a.matches("<circle").count(), 1);
        assert_eq!(a.matches("<path").count(), 1);
    }
}

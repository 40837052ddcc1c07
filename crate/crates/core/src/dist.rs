//! Value distributions: residue scans, pushforward samples along random
//! irrationals, empirical CDFs and the diagnostics used to compare them.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use num_integer::Integer;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cf::frak_t_threshold;
use crate::engine::{ext_neg_series, ext_pos, ExtResult, IrrationalStream, QmfSpec};
use crate::error::{domain, Result};
use crate::forms::{CotTable, Form, KontsevichScan};
use crate::rational::Rational;
use crate::special::real_pow;

/// Scaling applied to scanned values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `f(a/q)`, the natural choice for `Re k < 0`.
    Raw,
    /// `q^{-k} f(a/q)` up to the root-of-unity phase, for `Re k > 0`.
    QPowMinusK,
}

impl Normalization {
    pub fn tag(self) -> &'static str {
        match self {
            Normalization::Raw => "raw",
            Normalization::QPowMinusK => "qk",
        }
    }
}

/// How a sample was produced.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleSource {
    Scan { q: u64, norm: Normalization },
    Pushforward(PushforwardConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleMeta {
    pub form: String,
    pub source: SampleSource,
    /// Projection angle, once the sample has been projected.
    pub angle: Option<f64>,
}

/// A finite multiset of complex values with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalSample {
    pub values: Vec<Complex64>,
    pub meta: SampleMeta,
}

/// `φ_ξ(z) = Re(e^{iξ} z)`.
pub fn project(z: Complex64, angle: f64) -> f64 {
    let (s, c) = angle.sin_cos();
    c * z.re - s * z.im
}

impl EmpiricalSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn project(&self, angle: f64) -> Vec<f64> {
        self.values.iter().map(|&z| project(z, angle)).collect()
    }
}

/// Evaluates `f(a/q)` (suitably normalized) for the residues of one `q`,
/// sharing per-denominator tables across residues.
#[derive(Debug)]
pub struct Scanner<'a> {
    form: &'a Form,
    q: u64,
    norm: Normalization,
    scale: Complex64,
    kind: ScanKind,
}

#[derive(Debug)]
enum ScanKind {
    Cotangent(Arc<CotTable>),
    Kontsevich(KontsevichScan),
    Pointwise,
}

impl<'a> Scanner<'a> {
    pub fn new(form: &'a Form, q: u64, norm: Normalization) -> Result<Self> {
        if q < 2 {
            return Err(domain("scans need q ≥ 2"));
        }
        let kind = match form {
            Form::Cotangent(c) => ScanKind::Cotangent(c.table(q)?),
            Form::Kontsevich => ScanKind::Kontsevich(KontsevichScan::new(q)?),
            _ => ScanKind::Pointwise,
        };
        let scale = match norm {
            Normalization::Raw => Complex64::new(1.0, 0.0),
            Normalization::QPowMinusK => real_pow(q as f64, -form.weight()),
        };
        Ok(Scanner { form, q, norm, scale, kind })
    }

    /// Residues `1 ≤ a ≤ q` coprime to `q`, in increasing order.
    pub fn residues(&self) -> Vec<u64> {
        (1..=self.q).filter(|a| a.gcd(&self.q) == 1).collect()
    }

    /// The scanned value at residue `a`. For the Kontsevich function the
    /// normalized value is `φ★(a/q)`, which carries the phase `e(-σ/24)`
    /// and reads `φ` at `ā/q`.
    pub fn value(&self, a: u64) -> Result<Complex64> {
        let v = match (&self.kind, self.norm) {
            (ScanKind::Cotangent(t), _) => match self.form {
                Form::Cotangent(c) => c.c_with_table(t, a as i64),
                _ => unreachable!("table kind matches form"),
            },
            (ScanKind::Kontsevich(s), Normalization::QPowMinusK) => return s.phistar(a as i64),
            (ScanKind::Kontsevich(s), Normalization::Raw) => s.phi(a as i64),
            (ScanKind::Pointwise, _) => self.form.eval(&Rational::new(a, self.q)?)?,
        };
        Ok(v * self.scale)
    }

    pub fn meta(&self) -> SampleMeta {
        SampleMeta {
            form: self.form.id(),
            source: SampleSource::Scan { q: self.q, norm: self.norm },
            angle: None,
        }
    }
}

/// `{f(a/q) : 1 ≤ a ≤ q, (a, q) = 1}`, one value per residue.
pub fn scan_form(form: &Form, q: u64, norm: Normalization) -> Result<EmpiricalSample> {
    let scanner = Scanner::new(form, q, norm)?;
    let values = scanner.residues().into_iter().map(|a| scanner.value(a)).collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalSample { values, meta: scanner.meta() })
}

/// Empirical distribution function of a finite set of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    /// NaN values are rejected.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("empty sample"));
        }
        if points.iter().any(|p| p.is_nan()) {
            return Err(domain("sample contains NaN"));
        }
        points.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted: points })
    }

    pub fn points(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `#{x ≤ t} / n`.
    pub fn eval(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.sorted.len() as f64
    }
}

/// ECDF of the projection `Re(e^{iξ} z)` of the sample.
pub fn ecdf(sample: &EmpiricalSample, angle: f64) -> Result<Ecdf> {
    Ecdf::new(sample.project(angle))
}

pub fn ecdf_eval(f: &Ecdf, t: f64) -> f64 {
    f.eval(t)
}

/// `sup_t |F(t) - G(t)|`, evaluated at every jump of either function.
pub fn ks_distance(f: &Ecdf, g: &Ecdf) -> f64 {
    let (a, b) = (f.points(), g.points());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// Largest fraction of points in a closed window `[t, t + ε]`.
pub fn max_atom(points: &[f64], eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(domain("window width must be positive"));
    }
    if points.is_empty() {
        return Err(domain("empty sample"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..sorted.len() {
        if hi < lo {
            hi = lo;
        }
        while hi < sorted.len() && sorted[hi] <= sorted[lo] + eps {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    Ok(best as f64 / sorted.len() as f64)
}

/// Distribution of the partial quotients of the random irrationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientLaw {
    /// `x` uniform on `(0, 1)`: given `ρ = v_{j-1}/v_j`, the next quotient
    /// satisfies `P(b ≥ m) = (1 + ρ)/(m + ρ)`. This is the exact law of the
    /// digits of a Lebesgue-random point.
    Lebesgue,
    /// Independent digits with `P(b = m) = log₂(1 + 1/(m(m + 2)))`.
    GaussKuzmin,
}

/// Parameters of a pushforward sample.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardConfig {
    pub n: usize,
    pub max_depth: usize,
    pub tol: f64,
    /// Quotients are capped at `max(B, j (log j)²)` so every stream lies in
    /// `𝔗(B)`.
    pub bound: f64,
    pub seed: u64,
    pub law: QuotientLaw,
    /// For `Re k < 0`, streams whose convergents pass this denominator
    /// before settling count as non-converged.
    pub max_den: u64,
}

impl Default for PushforwardConfig {
    fn default() -> Self {
        PushforwardConfig {
            n: 1000,
            max_depth: 80,
            tol: 1e-3,
            bound: 1e4,
            seed: 0,
            law: QuotientLaw::Lebesgue,
            max_den: 1 << 21,
        }
    }
}

/// The `index`-th random stream of a seeded family. Streams are independent
/// of each other and of evaluation order. `capped` counts quotients that hit
/// the `𝔗(B)` cap.
pub fn random_stream(cfg: &PushforwardConfig, index: u64, capped: Arc<AtomicUsize>) -> IrrationalStream {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let (law, bound) = (cfg.law, cfg.bound);
    let mut rho = 0.0f64;
    let mut j = 0usize;
    IrrationalStream::from_fn(move || {
        j += 1;
        // Uniform on (0, 1].
        let u = 1.0 - rng.gen::<f64>();
        let raw = match law {
            QuotientLaw::Lebesgue => ((1.0 + rho) / u - rho).floor(),
            QuotientLaw::GaussKuzmin => (1.0 / (u.exp2() - 1.0)).floor(),
        };
        let cap = frak_t_threshold(j, bound).floor();
        let b = if raw > cap {
            capped.fetch_add(1, Ordering::Relaxed);
            cap
        } else {
            raw.max(1.0)
        };
        rho = 1.0 / (b + rho);
        b as u64
    })
}

/// A pushforward sample together with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Pushforward {
    pub sample: EmpiricalSample,
    /// Streams whose extension did not converge; they are left out of the
    /// sample.
    pub failures: usize,
    /// Quotients clipped by the `𝔗(B)` cap.
    pub capped: usize,
}

/// Fraction of non-converged streams tolerated before the sample is refused.
pub const FAILURE_BUDGET: f64 = 0.01;

/// Evaluates the real-line extension of a form on random streams.
pub struct PushforwardEvaluator<'a> {
    form: &'a Form,
    spec: Option<QmfSpec>,
}

impl<'a> PushforwardEvaluator<'a> {
    /// `f†` for `Re k < 0` and `f★` for `Re k > 0`; for cotangent sums `f★`
    /// is normalized to `c_a★`.
    pub fn new(form: &'a Form) -> Result<Self> {
        let k = form.weight();
        if k.re == 0.0 {
            return Err(domain("no extension for Re k = 0"));
        }
        let spec = match form {
            Form::Akd { .. } => return Err(domain("no pushforward for A_{k,D}")),
            Form::Cotangent(c) if c.vanishes_identically() => None,
            _ => Some(form.spec()?),
        };
        if let Some(s) = spec.as_ref().filter(|_| k.re > 0.0) {
            // Sample the tail constant once, before any parallel use.
            s.tail_constant();
        }
        Ok(PushforwardEvaluator { form, spec })
    }

    pub fn eval(&self, stream: &mut IrrationalStream, cfg: &PushforwardConfig) -> Result<ExtResult> {
        let (tol, depth, max_den) = (cfg.tol, cfg.max_depth, Some(cfg.max_den));
        match (self.form, &self.spec) {
            (Form::Cotangent(c), _) if c.vanishes_identically() => {
                Ok(ExtResult { value: Complex64::default(), converged: true, depth: 0 })
            }
            (_, Some(spec)) if spec.weight.re < 0.0 => ext_neg_series(spec, stream, tol, depth, max_den),
            (Form::Cotangent(c), Some(spec)) => c.ext_pos_with_spec(spec, stream, tol, depth),
            (_, Some(spec)) => ext_pos(spec, stream, tol, depth),
            _ => Err(domain("no extension for this form")),
        }
    }

    /// The extension at the `index`-th stream of the family.
    pub fn eval_index(&self, cfg: &PushforwardConfig, index: u64, capped: Arc<AtomicUsize>) -> Result<ExtResult> {
        let mut stream = random_stream(cfg, index, capped);
        self.eval(&mut stream, cfg)
    }
}

/// Collects results (in stream order) into a pushforward sample, enforcing
/// the failure budget.
pub fn collect_pushforward(
    form: &Form,
    cfg: &PushforwardConfig,
    results: Vec<Result<ExtResult>>,
    capped: usize,
) -> Result<Pushforward> {
    let mut values = Vec::with_capacity(results.len());
    let mut failures = 0;
    for r in results {
        let r = r?;
        if r.converged && r.value.re.is_finite() && r.value.im.is_finite() {
            values.push(r.value);
        } else {
            failures += 1;
        }
    }
    if failures as f64 > FAILURE_BUDGET * cfg.n as f64 {
        return Err(domain(format!("{failures} of {} streams did not converge", cfg.n)));
    }
    let meta = SampleMeta { form: form.id(), source: SampleSource::Pushforward(cfg.clone()), angle: None };
    Ok(Pushforward { sample: EmpiricalSample { values, meta }, failures, capped })
}

/// `n` values of the extension of `form` at seeded random irrationals.
pub fn sample_pushforward(form: &Form, cfg: &PushforwardConfig) -> Result<Pushforward> {
    if cfg.n == 0 {
        return Err(domain("need n ≥ 1"));
    }
    let eval = PushforwardEvaluator::new(form)?;
    let capped = Arc::new(AtomicUsize::new(0));
    let results = (0..cfg.n as u64).map(|i| eval.eval_index(cfg, i, capped.clone())).collect();
    collect_pushforward(form, cfg, results, capped.load(Ordering::Relaxed))
}

/// `(log q)(log log q)²`.
pub fn frak_a_bound(q: u64) -> f64 {
    let l = (q as f64).ln();
    l * l.ln() * l.ln()
}

/// Share of residues `a` coprime to `q` whose fraction `a/q` lies in
/// `𝔗((log q)(log log q)²)`.
pub fn frak_a_fraction(q: u64) -> Result<f64> {
    if q < 3 {
        return Err(domain("need q ≥ 3"));
    }
    let bound = frak_a_bound(q);
    let mut total = 0u64;
    let mut inside = 0u64;
    for a in 1..q {
        if a.gcd(&q) != 1 {
            continue;
        }
        total += 1;
        let (mut num, mut den) = (q, a);
        let mut j = 0;
        let mut ok = true;
        while den != 0 {
            j += 1;
            let (b, r) = num.div_rem(&den);
            if b as f64 > frak_t_threshold(j, bound) {
                ok = false;
                break;
            }
            num = den;
            den = r;
        }
        if ok {
            inside += 1;
        }
    }
    Ok(inside as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{cf_expand, in_frak_t};

    fn ecdf_of(v: &[f64]) -> Ecdf {
        Ecdf::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ecdf_examples() {
        let f = ecdf_of(&[0.0, 1.0]);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(2.0), 1.0);
        assert_eq!(f.eval(0.0), 0.5);
        assert!(Ecdf::new(Vec::new()).is_err());
    }

    #[test]
    fn ks_examples() {
        let f = ecdf_of(&[0.0, 1.0]);
        assert_eq!(ks_distance(&f, &f), 0.0);
        assert_eq!(ks_distance(&ecdf_of(&[0.0]), &ecdf_of(&[5.0, 6.0])), 1.0);
        assert_eq!(ks_distance(&ecdf_of(&[0.0]), &f), 0.5);
    }

    #[test]
    fn atom_examples() {
        assert_eq!(max_atom(&[3.0; 10], 1e-3).unwrap(), 1.0);
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let m = max_atom(&grid, 0.01).unwrap();
        assert!((0.01..=0.03).contains(&m), "{m}");
    }

    #[test]
    fn projection_at_zero_is_real_part() {
        let z = Complex64::new(0.3, -2.0);
        assert_eq!(project(z, 0.0), 0.3);
        assert!((project(z, core::f64::consts::FRAC_PI_2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn scan_sizes_and_values() {
        let form = Form::from_id("cotangent", &[("a", "3")]).unwrap();
        let s = scan_form(&form, 30, Normalization::Raw).unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.values.iter().all(|z| *z == Complex64::default()));

        let k = scan_form(&Form::Kontsevich, 2, Normalization::QPowMinusK).unwrap();
        assert_eq!(k.len(), 1);
        let e = |t: f64| Complex64::new(0.0, 2.0 * core::f64::consts::PI * t).exp();
        let expected = e(-1.0 / 24.0) * 2f64.powf(-1.5) * 3.0 * e(1.0 / 48.0);
        assert!((k.values[0] - expected).norm() < 1e-12);

        let c = Form::from_id("cotangent", &[("a", "-2")]).unwrap();
        let s = scan_form(&c, 101, Normalization::Raw).unwrap();
        assert_eq!(s.len(), 100);
        for i in 0..50 {
            assert!((s.values[i] + s.values[99 - i]).norm() < 1e-9);
        }
    }

    #[test]
    fn frak_a_by_enumeration() {
        let bound = frak_a_bound(5);
        let direct = (1..5)
            .filter(|&a| in_frak_t(&cf_expand(&Rational::new(a, 5).unwrap()), bound))
            .count() as f64
            / 4.0;
        assert_eq!(frak_a_fraction(5).unwrap(), direct);
        let f = frak_a_fraction(1009).unwrap();
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn streams_are_seeded() {
        let cfg = PushforwardConfig { seed: 7, ..Default::default() };
        let take = |i| {
            let mut s = random_stream(&cfg, i, Arc::new(AtomicUsize::new(0)));
            (1..=30).map(|j| s.quotient(j).unwrap()).collect::<Vec<_>>()
        };
        assert_eq!(take(3), take(3));
        assert_ne!(take(3), take(4));
    }

    #[test]
    fn lebesgue_law_first_digit() {
        // P(b_1 = 1) = 1/2 for a uniform point.
        let cfg = PushforwardConfig::default();
        let n = 20000;
        let ones = (0..n)
            .filter(|&i| random_stream(&cfg, i, Arc::new(AtomicUsize::new(0))).quotient(1) == Some(1))
            .count();
        assert!((ones as f64 / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn pushforward_of_zero_form() {
        let form = Form::from_id("cotangent", &[("a", "3")]).unwrap();
        let cfg = PushforwardConfig { n: 20, ..Default::default() };
        let p = sample_pushforward(&form, &cfg).unwrap();
        assert!(p.sample.values.iter().all(|z| *z == Complex64::default()));
        assert_eq!(p, sample_pushforward(&form, &cfg).unwrap());
    }
}

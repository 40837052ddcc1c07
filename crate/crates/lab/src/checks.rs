//! The numbered acceptance criteria, grouped into suites.
//!
//! Each criterion returns a pass/fail verdict plus the measured numbers.
//! Tolerances are fixed here; the distributional thresholds are calibrated
//! constants read from `fixtures/ks_thresholds.conf`.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use qmf_core::cf::{
    backward_denominators, bar_invert, cf_expand, cf_odd, continuants, dedekind_sum, gauss_map, sigma_phase,
};
use qmf_core::dist::{
    ecdf, frak_a_fraction, ks_distance, max_atom, EmpiricalSample, Normalization, PushforwardConfig,
};
use qmf_core::engine::{
    eval_f, eval_psi, ext_pos_partial_sums, theta_exponent, w_eval, IrrationalStream, QmfSpec,
};
use qmf_core::forms::{
    a_kd, akd_depth_for, akd_divisor_side, fit_polynomial, eval_polynomial, kontsevich_phi, kontsevich_phistar,
    kontsevich_spec, BRange, Cotangent, EichlerIntegral, Form,
};
use qmf_core::special::{hurwitz_zeta, ramanujan_tau, sigma_div, EulerMaclaurinConfig};
use qmf_core::{Complex64, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compute::{pushforward, scan};
use crate::config::{Config, KS_FIXTURE};
use crate::parallel::par_map;

/// Verdict of one criterion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    /// `PASS [ 3] engine reciprocity (1.2 s): ...`
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.1} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

/// Inputs shared by the criteria: the main configuration (for the
/// `A_{k,D}` convention) and the KS fixture.
#[derive(Clone, Debug)]
pub struct Context {
    pub config: Config,
    pub ks: Config,
}

impl Default for Context {
    fn default() -> Self {
        Context { config: Config::defaults(), ks: Config::parse(KS_FIXTURE).expect("KS fixture parses") }
    }
}

type Check = fn(&Context) -> Result<(bool, String), String>;

pub const CRITERIA: [(usize, &str, Check); 13] = [
    (1, "exact continued-fraction identities", exact_identities),
    (2, "special functions", special_functions),
    (3, "engine reciprocity", engine_reciprocity),
    (4, "f-Psi duality", duality),
    (5, "h_a asymptotics", h_asymptotics),
    (6, "Kontsevich fixed values", kontsevich_values),
    (7, "Eichler integral of Delta", eichler),
    (8, "cotangent slope at a = 1.5", cotangent_slope),
    (9, "distribution stability", distribution_stability),
    (10, "diffuseness diagnostic", diffuseness),
    (11, "density of A_q", frak_a_density),
    (12, "w-bound", w_bound),
    (13, "A_{k,D} convention", akd_convention),
];

pub const SUITES: [(&str, &[usize]); 5] = [
    ("cf", &[1]),
    ("special", &[2]),
    ("engine", &[3, 4, 12]),
    ("forms", &[5, 6, 7, 8, 13]),
    ("dist", &[9, 10, 11]),
];

pub fn suite_names() -> Vec<&'static str> {
    let mut v: Vec<&str> = SUITES.iter().map(|s| s.0).collect();
    v.push("all");
    v
}

/// Criterion ids of a suite; `all` is every criterion.
pub fn suite(name: &str) -> Option<Vec<usize>> {
    if name == "all" {
        return Some((1..=CRITERIA.len()).collect());
    }
    SUITES.iter().find(|s| s.0 == name).map(|s| s.1.to_vec())
}

pub fn run(id: usize, ctx: &Context) -> Outcome {
    let (_, title, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, detail) = match check(ctx) {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn reduced(max_den: u64) -> Vec<(u64, u64)> {
    let mut v = Vec::new();
    for q in 2..=max_den {
        for b in 1..q {
            if gcd(b, q) == 1 {
                v.push((b, q));
            }
        }
    }
    v
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn r(p: u64, q: u64) -> Rational {
    Rational::new(p, q).expect("nonzero denominator")
}

fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

fn err(e: qmf_core::Error) -> String {
    e.to_string()
}

// 1 -------------------------------------------------------------------------

/// Returns the first identity that fails at `b/q`.
fn identities_at(b: u64, q: u64) -> Result<(), String> {
    let x = r(b, q);
    let fail = |what: &str| Err(format!("{what} fails at {b}/{q}"));
    if cf_expand(&x).value() != x {
        return fail("CF reconstruction");
    }
    let odd = cf_odd(&x).map_err(err)?;
    if odd.value() != x || odd.len() % 2 == 0 {
        return fail("odd CF reconstruction");
    }
    let bar = bar_invert(&x).map_err(err)?;
    let rev = odd.reversed();
    if rev.value() != bar {
        return fail("bar-reversal");
    }
    let u = backward_denominators(&odd).0;
    let v = continuants(&rev).0;
    let rr = odd.len();
    if v.len() != rr + 1 || (0..=rr).any(|j| v[j] != u[rr - j]) {
        return fail("u/v duality");
    }
    let s = dedekind_sum(&x);
    let s_inv = dedekind_sum(&r(q, b));
    let rhs = &(&(&(&r(b, q) + &r(q, b)) + &r(1, b * q)) * &r(1, 12)) - &r(1, 4);
    if &s + &s_inv != rhs {
        return fail("Dedekind reciprocity");
    }
    // Hickerson's identity, with the sign that matches s(1/3) = 1/18 and
    // σ(1/3) = 0; the `+ 12 s(x)` form fails already at x = 1/3.
    let sigma = Rational::from_integer(sigma_phase(&x).map_err(err)?);
    let twelve_s = &s * &Rational::from_integer(12);
    if sigma != &(&x + &bar) - &twelve_s {
        return fail("σ = x + x̄ - 12 s(x)");
    }
    if sigma_phase(&bar).map_err(err)? != sigma_phase(&x).map_err(err)? {
        return fail("σ reversal invariance");
    }
    if &x * &gauss_map(&x).map_err(err)? > r(1, 2) {
        return fail("x T(x) ≤ 1/2");
    }
    Ok(())
}

fn exact_identities(_: &Context) -> Result<(bool, String), String> {
    let start = Instant::now();
    let xs = reduced(500);
    let failures: Vec<String> = par_map(&xs, |&(b, q)| identities_at(b, q).err()).into_iter().flatten().collect();
    let secs = start.elapsed().as_secs_f64();
    let ok = failures.is_empty() && secs < 30.0;
    let mut detail = format!(
        "{} rationals with den ≤ 500 (σ identity with -12 s(x)), {} failures, {secs:.1} s (limit 30 s)",
        xs.len(),
        failures.len()
    );
    if let Some(f) = failures.first() {
        detail += &format!("; first: {f}");
    }
    Ok((ok, detail))
}

// 2 -------------------------------------------------------------------------

fn special_functions(_: &Context) -> Result<(bool, String), String> {
    let cfg = EulerMaclaurinConfig::DEFAULT;
    let basel = hurwitz_zeta(Complex64::new(2.0, 0.0), 1.0, &cfg).map_err(err)?;
    let basel_err = (basel - PI * PI / 6.0).norm();
    let mut linear_err: f64 = 0.0;
    for i in 1..=20 {
        let x = i as f64 / 20.0;
        let z = hurwitz_zeta(Complex64::new(0.0, 0.0), x, &cfg).map_err(err)?;
        linear_err = linear_err.max((z - (0.5 - x)).norm());
    }
    let other = EulerMaclaurinConfig::new(48, 18).map_err(err)?;
    let ss = [
        Complex64::new(-2.5, 0.0),
        Complex64::new(-1.2, 0.7),
        Complex64::new(-0.5, 0.51),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.5, 1.39),
        Complex64::new(1.5, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(2.5, -1.0),
        Complex64::new(3.7, 2.0),
        Complex64::new(4.5, 0.0),
    ];
    let xs = [0.05, 0.13, 0.25, 1.0 / 3.0, 0.5, 0.61, 0.75, 0.87, 0.99, 1.0];
    let mut cross: f64 = 0.0;
    for &s in &ss {
        for &x in &xs {
            let a = hurwitz_zeta(s, x, &cfg).map_err(err)?;
            let b = hurwitz_zeta(s, x, &other).map_err(err)?;
            cross = cross.max((a - b).norm() / b.norm());
        }
    }
    let tau = ramanujan_tau(200);
    let bad_tau = (1..=200u64)
        .filter(|&n| {
            let s = sigma_div(11, n) % BigUint::from(691u32);
            let t = tau[n as usize].rem_euclid(691) as u32;
            s != BigUint::from(t)
        })
        .count();
    let ok = basel_err < 1e-12 && linear_err < 1e-12 && cross < 1e-12 && bad_tau == 0;
    Ok((
        ok,
        format!(
            "|ζ(2,1) - π²/6| = {basel_err:.1e}, max |ζ(0,x) - (1/2 - x)| = {linear_err:.1e}, \
             cross-order max rel diff (K,M) = (32,12) vs (48,18) on 100 points = {cross:.1e}, \
             τ ≢ σ11 mod 691 for {bad_tau} of 200 (tol 1e-12)"
        ),
    ))
}

// 3, 4 ----------------------------------------------------------------------

fn cotangent_specs() -> Result<Vec<(String, QmfSpec)>, String> {
    let list = [(-2.5, 0.0), (-0.5, 0.51), (0.5, 0.0), (0.5, 1.39), (1.5, 0.0)];
    list.iter()
        .map(|&(re, im)| {
            let c = Arc::new(Cotangent::new(Complex64::new(re, im)).map_err(err)?);
            Ok((format!("c̃_{}", qmf_core::forms::format_complex(c.a())), c.spec()))
        })
        .collect()
}

/// `|f(x) - θ^{3 sgn x} |x|^{-k} f(-1/x) - h(x)|`, relative to `max(1, |f(x)|)`.
fn reciprocity_residual(spec: &QmfSpec, x: &Rational) -> f64 {
    let f = eval_f(spec, x);
    let finv = eval_f(spec, &x.neg_recip().expect("x ≠ 0"));
    let sgn = if x.is_positive() { 3 } else { -3 };
    let t = x.abs().to_f64();
    let lhs = f - spec.twist.pow(sgn) * Complex64::new(t, 0.0).powc(-spec.weight) * finv;
    (lhs - spec.period(x)).norm() / f.norm().max(1.0)
}

fn engine_reciprocity(_: &Context) -> Result<(bool, String), String> {
    let mut specs = cotangent_specs()?;
    specs.push(("φ".into(), kontsevich_spec()));
    let xs = reduced(300);
    let mut worst: Vec<String> = Vec::new();
    let mut ok = true;
    for (name, spec) in &specs {
        let res = par_map(&xs, |&(b, q)| reciprocity_residual(spec, &r(b, q)));
        let max = res.iter().cloned().fold(0.0, f64::max);
        let nan = res.iter().any(|v| !v.is_finite());
        ok &= max < 1e-9 && !nan;
        worst.push(format!("{name} {max:.1e}"));
    }
    Ok((ok, format!("max relative residual over {} x (tol 1e-9): {}", xs.len(), worst.join(", "))))
}

/// `|θ_r(x)^{-1} q^{-k} f(x) - Ψ(x̄)|`, relative to `max(1, |Ψ(x̄)|)`.
fn duality_residual(spec: &QmfSpec, b: u64, q: u64) -> f64 {
    let x = r(b, q);
    let cf = cf_odd(&x).expect("0 < x ≤ 1");
    let th = spec.twist.pow_reduced(theta_exponent(&cf.quotients, &spec.twist)).conj();
    let lhs = th * Complex64::new(q as f64, 0.0).powc(-spec.weight) * eval_f(spec, &x);
    match eval_psi(spec, &bar_invert(&x).expect("0 < x ≤ 1")) {
        Ok(rhs) => (lhs - rhs).norm() / rhs.norm().max(1.0),
        Err(_) => f64::NAN,
    }
}

fn duality(_: &Context) -> Result<(bool, String), String> {
    let weak = Arc::new(Cotangent::new(Complex64::new(0.5, 1.39)).map_err(err)?);
    let specs = [("full: φ", kontsevich_spec()), ("weak: c̃_{0.5+1.39i}", weak.spec())];
    let mut xs = reduced(500);
    xs.push((1, 1));
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec) in &specs {
        let res = par_map(&xs, |&(b, q)| duality_residual(spec, b, q));
        let max = res.iter().cloned().fold(0.0, f64::max);
        ok &= max < 1e-10 && res.iter().all(|v| v.is_finite());
        parts.push(format!("{name} {max:.1e}"));
    }
    Ok((ok, format!("max relative residual over {} x with den ≤ 500 (tol 1e-10): {}", xs.len(), parts.join(", "))))
}

// 5 -------------------------------------------------------------------------

/// `|h_a(1/n) - main terms|` for the given `n`.
fn h_residuals(a: f64, ns: &[u64], corrections: usize) -> Result<Vec<f64>, String> {
    let c = Cotangent::new(Complex64::new(a, 0.0)).map_err(err)?;
    ns.iter()
        .map(|&n| {
            let h = c.h(&r(1, n)).map_err(err)?;
            let main = c.h_asymptotic(1.0 / n as f64, corrections).map_err(err)?;
            Ok((h - main).norm())
        })
        .collect()
}

fn h_asymptotics(_: &Context) -> Result<(bool, String), String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [-2.5, 0.5, 0.0] {
        let res = h_residuals(a, &[100, 1000], 0)?;
        let ratio = res[1] / res[0];
        ok &= ratio < 0.05;
        parts.push(format!("a = {a}: {:.3e}/{:.3e} = {ratio:.4}", res[1], res[0]));
    }
    // With the first correction term of the full expansion the remainder is
    // O(x³); shown for reference.
    let with_m1 = h_residuals(0.5, &[10, 100], 1)?;
    Ok((
        ok,
        format!(
            "ratio at n = 1000 vs 100 (need < 0.05): {}; an O(x) remainder gives 0.1 \
             [with one correction term, a = 0.5, n = 100 vs 10: {:.1e}]",
            parts.join(", "),
            with_m1[1] / with_m1[0]
        ),
    ))
}

// 6 -------------------------------------------------------------------------

fn kontsevich_values(_: &Context) -> Result<(bool, String), String> {
    let half = kontsevich_phi(&r(1, 2)).map_err(err)?;
    let half_err = (half - e(1.0 / 48.0) * 3.0).norm();
    let ns = [10u64, 20, 50, 100, 200];
    let dist: Vec<f64> = ns
        .iter()
        .map(|&n| kontsevich_phistar(&r(1, n)).map(|v| (v - 1.0).norm()).map_err(err))
        .collect::<Result<_, _>>()?;
    let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
    let at_200 = dist[4];

    let spec = kontsevich_spec();
    let mut s = IrrationalStream::constant(2).map_err(err)?;
    let sums = ext_pos_partial_sums(&spec, &mut s, 16).map_err(err)?;
    let diffs: Vec<f64> = sums.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let ratios: Vec<f64> = diffs.windows(2).filter(|w| w[0] > 1e-11).map(|w| w[1] / w[0]).collect();
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let limit = 2f64.powf(-0.75) + 0.05;
    let ok = half_err < 1e-12 && decreasing && at_200 < 0.05 && max_ratio <= limit && !ratios.is_empty();
    Ok((
        ok,
        format!(
            "|φ(1/2) - 3e(1/48)| = {half_err:.1e}; |φ★(1/n) - 1| for n = 10..200: [{}] (decreasing: {decreasing}, \
             need < 0.05 at 200); √2-1 partial-sum ratio max {max_ratio:.4} over {} steps (limit {limit:.4})",
            dist.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(", "),
            ratios.len()
        ),
    ))
}

// 7 -------------------------------------------------------------------------

fn eichler(_: &Context) -> Result<(bool, String), String> {
    let d = EichlerIntegral::delta();
    let tol = 1e-9;
    let h1 = d.h(&r(1, 1), tol).map_err(err)?;
    let h1_ok = h1.value.norm() <= 1e-6;

    // Fit on 50 points, validate on 20 others.
    let fit_x: Vec<Rational> = (1..=50).map(|b| r(b, 53)).collect();
    let test_x: Vec<Rational> = (1..=20).map(|b| Rational::new(b as i64 * 2 - 21, 23).unwrap()).collect();
    let eval_h = |x: &Rational| d.h(x, 1e-12).map(|t| t.value.re).map_err(err);
    let ys: Vec<f64> = fit_x.iter().map(eval_h).collect::<Result<_, _>>()?;
    let xs: Vec<f64> = fit_x.iter().map(Rational::to_f64).collect();
    let coeffs = fit_polynomial(&xs, &ys, 10).map_err(err)?;
    let mut gen: f64 = 0.0;
    for x in &test_x {
        gen = gen.max((eval_polynomial(&coeffs, x.to_f64()) - eval_h(x)?).abs());
    }

    let oracle = 0.98945177;
    let five = d.partial_sum(&r(0, 1), 5).map_err(err)?.re;
    let full = d.eval(&r(0, 1), 1e-12).map_err(err)?;
    let gap = (full.value.re - oracle).abs();
    let bound = d.tail_bound(5) + full.bound;
    let ok = h1_ok && gen < 1e-6 && gap <= bound;
    Ok((
        ok,
        format!(
            "|h(1)| = {:.1e} (bound {:.1e}, need ≤ 1e-6); degree-10 fit held-out residual {gen:.1e} (need < 1e-6); \
             Δ̃(0) = {:.11} vs oracle {oracle} (5-term sum {five:.11}): gap {gap:.1e} ≤ tail bound {bound:.1e}",
            h1.value.norm(),
            h1.bound,
            full.value.re
        ),
    ))
}

// 8 -------------------------------------------------------------------------

/// Gauss–Kuzmin draw `b = ⌊1/(2^U - 1)⌋`.
fn gauss_kuzmin(rng: &mut ChaCha8Rng) -> u64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    ((1.0 / (u.exp2() - 1.0)).floor() as u64).clamp(1, 10_000)
}

fn tail(quotients: &[u64]) -> f64 {
    quotients.iter().rev().fold(0.0, |t, &b| 1.0 / (b as f64 + t))
}

fn cotangent_slope(_: &Context) -> Result<(bool, String), String> {
    let c = Arc::new(Cotangent::new(Complex64::new(1.5, 0.0)).map_err(err)?);
    let spec = c.spec();
    let target = -(c.a_kappa1().re);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut pairs = Vec::new();
    while pairs.len() < 100 {
        // A shared prefix with continuant in [1e5, 1e6), then tails that
        // differ from the first quotient on: one starts with 1, the other
        // with a quotient ≥ 3, so the points are well separated.
        let mut prefix = Vec::new();
        let (mut v0, mut v1) = (0u64, 1u64);
        while v1 < 100_000 {
            let b = gauss_kuzmin(&mut rng);
            prefix.push(b);
            (v0, v1) = (v1, b.saturating_mul(v1).saturating_add(v0));
        }
        if v1 >= 1_000_000 {
            continue;
        }
        let mut ta = vec![1];
        let mut tb = vec![3 + gauss_kuzmin(&mut rng)];
        for _ in 0..40 {
            ta.push(gauss_kuzmin(&mut rng));
            tb.push(gauss_kuzmin(&mut rng));
        }
        pairs.push((prefix, ta, tb, v0, v1));
    }
    let slopes = par_map(&pairs, |(prefix, ta, tb, v0, v1)| -> Result<f64, String> {
        let value = |t: &Vec<u64>| -> Result<f64, String> {
            let mut s = IrrationalStream::periodic([prefix.as_slice(), t.as_slice()].concat(), vec![1, 2]).map_err(err)?;
            let res = c.ext_pos_with_spec(&spec, &mut s, 1e-14, 400).map_err(err)?;
            if !res.converged {
                return Err("ext_pos did not converge".into());
            }
            Ok(res.value.re)
        };
        let (fa, fb) = (value(ta)?, value(tb)?);
        let (t, u) = (tail(ta), tail(tb));
        // x(t) = (p_d + p_{d-1} t)/(q_d + q_{d-1} t), so
        // x(t) - x(u) = ± (t - u) / ((q_d + q_{d-1} t)(q_d + q_{d-1} u)).
        let (qd, qd1) = (*v1 as f64, *v0 as f64);
        let sign = if prefix.len() % 2 == 0 { 1.0 } else { -1.0 };
        let dx = sign * (t - u) / ((qd + qd1 * t) * (qd + qd1 * u));
        Ok((fa - fb) / dx)
    });
    let slopes: Vec<f64> = slopes.into_iter().collect::<Result<_, _>>()?;
    let mut sorted = slopes.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let within = slopes.iter().filter(|s| ((*s / target) - 1.0).abs() < 0.1).count();
    let ok = within == slopes.len();
    Ok((
        ok,
        format!(
            "target -aζ(1-a)/π = {target:.5}; {within}/{} pair slopes within 10%, median {median:.5}, range [{:.5}, {:.5}]",
            slopes.len(),
            sorted[0],
            sorted[sorted.len() - 1]
        ),
    ))
}

// 9, 10, 11 -----------------------------------------------------------------

fn ks(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64, String> {
    Ok(ks_distance(&ecdf(a, 0.0).map_err(err)?, &ecdf(b, 0.0).map_err(err)?))
}

fn pair(cfg: &Config, key: &str) -> Result<(u64, u64), String> {
    let text: String = cfg.require(key)?;
    let parts: Vec<u64> = text.split(',').map(|p| p.trim().parse().map_err(|_| format!("bad {key}"))).collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("{key} needs two denominators")),
    }
}

fn distribution_stability(ctx: &Context) -> Result<(bool, String), String> {
    let small = pair(&ctx.ks, "cross_q.small")?;
    let large = pair(&ctx.ks, "cross_q.large")?;
    let max_large: f64 = ctx.ks.require("cross_q.max_large")?;
    let pf_q: u64 = ctx.ks.require("pushforward.q")?;
    let pf_cfg = PushforwardConfig {
        n: ctx.ks.require("pushforward.n")?,
        seed: ctx.ks.require("pushforward.seed")?,
        ..Default::default()
    };
    let pf_max: f64 = ctx.ks.require("pushforward.max")?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, norm) in [("-2", Normalization::Raw), ("0.5", Normalization::QPowMinusK)] {
        let form = Form::from_id("cotangent", &[("a", a)]).map_err(err)?;
        let s = |q| scan(&form, q, norm).map_err(err);
        let d_small = ks(&s(small.0)?, &s(small.1)?)?;
        let d_large = ks(&s(large.0)?, &s(large.1)?)?;
        let pf = pushforward(&form, &pf_cfg).map_err(err)?;
        let d_pf = ks(&s(pf_q)?, &pf.sample)?;
        ok &= d_large < d_small && d_large < max_large && d_pf < pf_max;
        parts.push(format!(
            "c_{{{a}}} ({}): KS{small:?} = {d_small:.4}, KS{large:?} = {d_large:.4}, \
             KS(scan {pf_q}, pushforward {}) = {d_pf:.4} [{} non-converged]",
            norm.tag(),
            pf_cfg.n,
            pf.failures
        ));
    }
    Ok((ok, format!("{} (limits {max_large}, {pf_max})", parts.join("; "))))
}

fn diffuseness(_: &Context) -> Result<(bool, String), String> {
    let atom = |a: &str| -> Result<f64, String> {
        let form = Form::from_id("cotangent", &[("a", a)]).map_err(err)?;
        let s = scan(&form, 5000, Normalization::Raw).map_err(err)?;
        max_atom(&s.project(0.0), 1e-3).map_err(err)
    };
    let (m2, m3) = (atom("-2")?, atom("3")?);
    Ok((m2 < 0.05 && m3 == 1.0, format!("max_atom(ε = 1e-3) at q = 5000: c_{{-2}} {m2:.4} (need < 0.05), c_3 {m3} (need 1)")))
}

fn frak_a_density(_: &Context) -> Result<(bool, String), String> {
    let qs = [1009u64, 10007, 100003];
    let f: Vec<f64> = qs.iter().map(|&q| frak_a_fraction(q).map_err(err)).collect::<Result<_, _>>()?;
    let monotone = f.windows(2).all(|w| w[1] >= w[0] - 0.02);
    let ok = f[2] >= 0.9 && monotone;
    Ok((
        ok,
        format!(
            "fractions at q = 1009, 10007, 100003: {:.4}, {:.4}, {:.4} (need ≥ 0.9 at 100003; nondecreasing within 0.02: {monotone})",
            f[0], f[1], f[2]
        ),
    ))
}

// 12 ------------------------------------------------------------------------

/// Test functions on `[0, 1]` with their exact sup norms.
fn w_family(i: usize, t: f64) -> Complex64 {
    match i {
        0 => e(3.0 * t),
        1 => Complex64::new((1.0 - t).powi(3), 0.0),
        2 => Complex64::new(1.0 / (1.0 + t), 0.0),
        3 => e(t) * t,
        _ => Complex64::new(2.0 + (7.0 * t).sin(), 0.0),
    }
}

const W_SUP: [f64; 5] = [1.0, 1.0, 1.0, 1.0, 3.0];

fn w_bound(_: &Context) -> Result<(bool, String), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let lambdas = [1.0, 2.5, 4.0];
    let mut violations = 0;
    let mut nonzero = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let len = rng.gen_range(1..=40);
        let qs: Vec<u64> = (0..len).map(|_| gauss_kuzmin(&mut rng).min(50)).collect();
        let x = qmf_core::cf::CfExpansion::from_u64(0, &qs).map_err(err)?.value();
        let x = if x == Rational::one() { Rational::zero() } else { x };
        let j = rng.gen_range(0..=30usize);
        let lambda = lambdas[rng.gen_range(0..3)];
        let g = rng.gen_range(0..W_SUP.len());
        let w = w_eval(j, lambda, |t| w_family(g, t.to_f64()), &x).map_err(err)?;
        let bound = 2f64.powf(lambda * (1.0 - j as f64 / 2.0)) * W_SUP[g];
        if w.norm() > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        if w.norm() > 0.0 {
            nonzero += 1;
            worst = worst.max(w.norm() / bound);
        }
    }
    Ok((violations == 0, format!("{violations} violations in 200 draws ({nonzero} nonzero; max |w|/bound = {worst:.3})")))
}

// 13 ------------------------------------------------------------------------

fn akd_convention(ctx: &Context) -> Result<(bool, String), String> {
    let k: u32 = ctx.config.require("akd.k")?;
    let d: i64 = ctx.config.require("akd.D")?;
    let selected = match ctx.config.require::<String>("akd.b")?.as_str() {
        "all" => BRange::All,
        "nonneg" => BRange::NonNegative,
        other => return Err(format!("akd.b must be all or nonneg, got {other}")),
    };
    let depth = akd_depth_for(k, d, 1e-12).map_err(err)?;
    let target = akd_divisor_side(k, d).map_err(err)?;
    let target = target.to_string().parse::<f64>().map_err(|e| e.to_string())?;
    let mut matching = Vec::new();
    let mut parts = Vec::new();
    for range in [BRange::All, BRange::NonNegative] {
        let v = a_kd(k, d, &Rational::zero(), depth, range).map_err(err)?;
        if (v.value - target).abs() <= v.tail_bound + 1e-12 * target.abs() {
            matching.push(range);
        }
        parts.push(format!("{range:?}: {}", v.value));
    }
    let ok = matching == [selected];
    Ok((
        ok,
        format!(
            "A_{{{k},{d}}}(0) by enumeration: {}; divisor side {target}; matching conventions {matching:?}, configured {selected:?}",
            parts.join(", ")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_cover_every_criterion_once() {
        let mut ids: Vec<usize> = SUITES.iter().flat_map(|s| s.1.iter().copied()).collect();
        ids.sort();
        assert_eq!(ids, (1..=13).collect::<Vec<_>>());
        assert_eq!(suite("all").unwrap().len(), 13);
        assert!(suite("nope").is_none());
        for (i, c) in CRITERIA.iter().enumerate() {
            assert_eq!(c.0, i + 1);
        }
    }

    #[test]
    fn identities_hold_for_small_denominators() {
        for (b, q) in reduced(40) {
            identities_at(b, q).unwrap();
        }
    }

    #[test]
    fn wrong_akd_convention_fails() {
        let mut ctx = Context::default();
        assert!(akd_convention(&ctx).unwrap().0);
        ctx.config = ctx.config.merged(Config::parse("[akd]\nb = all").unwrap());
        assert!(!akd_convention(&ctx).unwrap().0);
    }
}

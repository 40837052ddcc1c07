//! The Kontsevich function
//!
//! ```text
//! φ(x) = e(x/24) Σ_{m≥0} (1 - e(x)) ⋯ (1 - e(mx))
//! ```
//!
//! For `x = a/q` the products vanish once `m ≥ q`. The defining sum is
//! numerically hopeless for large `q` (the partial products grow like
//! `e^{cq}`), so [`kontsevich_phi`] uses the expression as a value of an
//! L-function at `-1`:
//!
//! ```text
//! φ(a/q) = -½ L(-1, C),   C(n) = χ12(n) e(n² a/M),   M = 24q,
//! L(-1, C) = -(M/2) Σ_{n=1}^{M} C(n) B₂(n/M).
//! ```
//!
//! Pairing `n` with `M - n` halves the sum; only `n ≡ ±1, ±5 (mod 12)`
//! contribute, so one evaluation costs `4q` terms.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::ToPrimitive;

use crate::cf::{bar_invert, sigma_phase};
use crate::engine::{Periodicity, QmfSpec, RootOfUnity};
use crate::error::{domain, Result};
use crate::rational::Rational;
use crate::sum::ComplexSum;

/// Largest denominator accepted by the `O(q)` evaluation.
pub const MAX_DENOMINATOR: u64 = 1 << 26;

fn chi12(n: u64) -> i8 {
    match n % 12 {
        1 | 11 => 1,
        5 | 7 => -1,
        _ => 0,
    }
}

fn e(t: f64) -> Complex64 {
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

/// The half-range sum with weights `(6n² - 6nM + M²)/(12M) = (M/2) B₂(n/M)`;
/// `phase(j)` must return `e(j/M)` for `0 ≤ j < M`.
fn l_value_sum(a: i64, q: u64, phase: impl Fn(u64) -> Complex64) -> Complex64 {
    let m = 24 * q;
    let a = (a as i128).rem_euclid(m as i128) as u64;
    let mi = m as i128;
    let mut acc = ComplexSum::new();
    for n in 1..m / 2 {
        let chi = chi12(n);
        if chi == 0 {
            continue;
        }
        let ni = n as i128;
        let weight = (6 * ni * ni - 6 * ni * mi + mi * mi) as f64 / (12 * m) as f64;
        let j = ((n * n) % m) * a % m;
        acc.add(phase(j) * (weight * chi as f64));
    }
    acc.value()
}

fn small_parts(x: &Rational) -> Result<(i64, u64)> {
    match x.to_i64_pair() {
        Some((a, q)) if (q as u64) <= MAX_DENOMINATOR => Ok((a, q as u64)),
        _ => Err(domain(format!("denominator of {x} too large for the Kontsevich sum"))),
    }
}

/// `φ(x)` for any rational `x`.
pub fn kontsevich_phi(x: &Rational) -> Result<Complex64> {
    let (a, q) = small_parts(x)?;
    let m = (24 * q) as f64;
    Ok(l_value_sum(a, q, |j| e(j as f64 / m)))
}

/// `φ(x)` from the defining sum of products. Only usable for small
/// denominators; kept as an independent check.
pub fn kontsevich_phi_direct(x: &Rational) -> Result<Complex64> {
    let (a, q) = small_parts(x)?;
    if q > 64 {
        return Err(domain("the product sum overflows for denominators above 64"));
    }
    let xf = a as f64 / q as f64;
    let mut acc = ComplexSum::new();
    let mut prod = Complex64::new(1.0, 0.0);
    acc.add(prod);
    for n in 1..q as i64 {
        let r = (n * a).rem_euclid(q as i64) as f64 / q as f64;
        prod *= Complex64::new(1.0, 0.0) - e(r);
        acc.add(prod);
    }
    Ok(e(xf / 24.0) * acc.value())
}

/// Values `φ(a/q)` for a fixed denominator, sharing one table of `e(j/24q)`.
#[derive(Debug, Clone)]
pub struct KontsevichScan {
    q: u64,
    phases: Vec<Complex64>,
}

impl KontsevichScan {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 || q > MAX_DENOMINATOR {
            return Err(domain(format!("Kontsevich denominator {q} out of range")));
        }
        let m = 24 * q;
        let phases = (0..m).map(|j| e(j as f64 / m as f64)).collect();
        Ok(KontsevichScan { q, phases })
    }

    pub fn denominator(&self) -> u64 {
        self.q
    }

    /// `φ(a/q)`; `a` must be coprime to `q` (not checked).
    pub fn phi(&self, a: i64) -> Complex64 {
        l_value_sum(a, self.q, |j| self.phases[j as usize])
    }

    /// `φ★(a/q) = e(-σ(a/q)/24) q^{-3/2} φ(ā/q)` for `0 < a ≤ q` coprime to `q`.
    pub fn phistar(&self, a: i64) -> Result<Complex64> {
        let x = Rational::new(a, self.q)?;
        let (sigma, bar) = star_parts(&x)?;
        Ok(e(-sigma / 24.0) * (self.q as f64).powf(-1.5) * self.phi(bar))
    }
}

/// `σ(x) mod 24` and the numerator of `x̄`.
fn star_parts(x: &Rational) -> Result<(f64, i64)> {
    let sigma = sigma_phase(x)?.mod_floor(&24.into()).to_f64().unwrap_or(0.0);
    let bar = bar_invert(x)?;
    let num = bar.num().to_i64().ok_or_else(|| domain("numerator too large"))?;
    Ok((sigma, num))
}

/// `φ★(x) = e(-σ(x)/24) den(x)^{-3/2} φ(x̄)` for `0 < x ≤ 1`.
pub fn kontsevich_phistar(x: &Rational) -> Result<Complex64> {
    let (sigma, bar) = star_parts(x)?;
    let (_, q) = small_parts(x)?;
    let phi = kontsevich_phi(&Rational::new(bar, q)?)?;
    Ok(e(-sigma / 24.0) * (q as f64).powf(-1.5) * phi)
}

/// `h(x) = φ(x) - e(sgn(x)/8) |x|^{-3/2} φ(-1/x)` for `x ≠ 0`.
pub fn kontsevich_h(x: &Rational) -> Result<Complex64> {
    if x.is_zero() {
        return Err(domain("h is not defined at 0"));
    }
    let t = x.abs().to_f64();
    let twist = e(x.signum() as f64 / 8.0);
    Ok(kontsevich_phi(x)? - twist * t.powf(-1.5) * kontsevich_phi(&x.neg_recip()?)?)
}

/// Engine spec: weight 3/2, `θ = e(1/24)`, full periodicity with `φ(0) = 1`.
///
/// Evaluation failures (denominators beyond [`MAX_DENOMINATOR`]) surface as
/// NaN.
pub fn kontsevich_spec() -> QmfSpec {
    let nan = Complex64::new(f64::NAN, f64::NAN);
    QmfSpec::new(
        Complex64::new(1.5, 0.0),
        RootOfUnity::new(1, 24).expect("valid root of unity"),
        move |x: &Rational| kontsevich_h(x).unwrap_or(nan),
        Periodicity::Full { f0: Complex64::new(1.0, 0.0) },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn fixed_values() {
        let near = |u: Complex64, v: Complex64| (u - v).norm() < 1e-12;
        assert!(near(kontsevich_phi(&r(0, 1)).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(near(kontsevich_phi(&r(1, 1)).unwrap(), e(1.0 / 24.0)));
        assert!(near(kontsevich_phi(&r(1, 2)).unwrap(), e(1.0 / 48.0) * 3.0));
        let star = kontsevich_phistar(&r(1, 1)).unwrap();
        assert!(near(star, e(-1.0 / 24.0)));
        let half = kontsevich_phistar(&r(1, 2)).unwrap();
        assert!(near(half, e(-1.0 / 24.0) * 2f64.powf(-1.5) * 3.0 * e(1.0 / 48.0)));
    }

    #[test]
    fn l_value_matches_products() {
        for q in 1..40i64 {
            for a in -2 * q..2 * q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let x = r(a, q);
                let (u, v) = (kontsevich_phi(&x).unwrap(), kontsevich_phi_direct(&x).unwrap());
                assert!((u - v).norm() < 1e-9 * v.norm().max(1.0), "{x}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn scan_matches_pointwise() {
        let scan = KontsevichScan::new(97).unwrap();
        for a in [1, 5, 48, 96] {
            let u = scan.phi(a);
            let v = kontsevich_phi(&r(a, 97)).unwrap();
            assert!((u - v).norm() < 1e-9 * v.norm());
            let s = scan.phistar(a).unwrap();
            assert!((s - kontsevich_phistar(&r(a, 97)).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn h_is_cauchy_near_zero() {
        let hs: Vec<Complex64> = [100, 200, 400, 800, 1600].iter().map(|&n| kontsevich_h(&r(1, n)).unwrap()).collect();
        let diffs: Vec<f64> = hs.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{diffs:?}");
        assert!(diffs[3] < 0.05);
    }

    #[test]
    fn phistar_agrees_with_engine() {
        let spec = kontsevich_spec();
        for q in 1..60i64 {
            for a in 1..=q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let x = r(a, q);
                let u = kontsevich_phistar(&x).unwrap();
                let v = crate::engine::eval_psi(&spec, &x).unwrap();
                assert!((u - v).norm() < 1e-10, "{x}: {u} vs {v}");
                let w = crate::engine::eval_f(&spec, &x);
                assert!((w - kontsevich_phi(&x).unwrap()).norm() < 1e-9 * w.norm().max(1.0), "{x}");
            }
        }
    }

    #[test]
    fn phistar_tends_to_one_at_zero() {
        let d: Vec<f64> = [10, 50, 200, 1000].iter().map(|&n| (kontsevich_phistar(&r(1, n)).unwrap() - 1.0).norm()).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
        assert!(d[2] < 0.05);
    }
}

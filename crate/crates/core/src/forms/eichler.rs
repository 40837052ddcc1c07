//! Eichler integrals of level-one cusp forms
//!
//! ```text
//! g̃(x) = Σ_{n≥1} a_n n^{1-k} e(nx)
//! ```
//!
//! for a weight-`k` cusp form `Σ a_n qⁿ`. With Deligne's bound
//! `|a_n| ≤ d(n) n^{(k-1)/2}` and `d(n) ≤ 2√n`, the tail after `N` terms is
//! at most `4 N^{-(k-4)/2} / (k - 4)`; for `Δ` this is `N^{-4}/2`.
//!
//! `g̃` is a quantum modular form of weight `2 - k` whose period function
//! `g̃(x) - |x|^{k-2} g̃(-1/x)` is a polynomial of degree at most `k - 2`.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use spin::Lazy;

use crate::engine::{Periodicity, QmfSpec, RootOfUnity};
use crate::error::{domain, Error, Result};
use crate::rational::Rational;
use crate::special::ramanujan_tau;
use crate::sum::ComplexSum;

/// Number of `τ(n)` kept for the default `Δ` instance.
pub const DELTA_TERMS: usize = 100_000;

static DELTA: Lazy<Arc<[i128]>> = Lazy::new(|| ramanujan_tau(DELTA_TERMS)[1..].into());

/// `τ(1), ..., τ(10⁵)`, computed on first use.
pub fn delta_coefficients() -> Arc<[i128]> {
    DELTA.clone()
}

/// A truncated value together with its guaranteed error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated {
    pub value: Complex64,
    pub bound: f64,
    pub terms: usize,
}

/// The Eichler integral of a level-one cusp form given by its coefficients.
#[derive(Clone, Debug)]
pub struct EichlerIntegral {
    weight: u32,
    /// `a_n n^{1-k}` for `n = 1..=N`.
    scaled: Arc<[f64]>,
}

impl EichlerIntegral {
    /// `coeffs[n - 1] = a_n`; `weight` is the weight of the cusp form, even
    /// and at least 12.
    pub fn new(coeffs: &[i128], weight: u32) -> Result<Self> {
        if weight < 12 || weight % 2 == 1 {
            return Err(domain(format!("level-one cusp forms have even weight ≥ 12, got {weight}")));
        }
        if coeffs.is_empty() {
            return Err(domain("no coefficients"));
        }
        let scaled = coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a as f64 * ((i + 1) as f64).powi(1 - weight as i32))
            .collect();
        Ok(EichlerIntegral { weight, scaled })
    }

    /// `Δ` with its cached coefficients.
    pub fn delta() -> Self {
        Self::new(&DELTA, 12).expect("Δ has weight 12")
    }

    /// Weight `k` of the cusp form.
    pub fn cusp_weight(&self) -> u32 {
        self.weight
    }

    /// Weight `2 - k` of the quantum modular form `g̃`.
    pub fn weight(&self) -> Complex64 {
        Complex64::new(2.0 - self.weight as f64, 0.0)
    }

    pub fn available(&self) -> usize {
        self.scaled.len()
    }

    /// Bound on `|Σ_{n>N} a_n n^{1-k} e(nx)|`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        let s = (self.weight as f64 - 4.0) / 2.0;
        2.0 * (n as f64).powf(-s) / s
    }

    /// Fewest terms whose tail bound is below `tol`.
    pub fn terms_for(&self, tol: f64) -> Result<usize> {
        if !(tol > 0.0) {
            return Err(domain("tolerance must be positive"));
        }
        let s = (self.weight as f64 - 4.0) / 2.0;
        let needed = (2.0 / (s * tol)).powf(1.0 / s).ceil() as usize;
        let mut n = needed.max(1);
        while n > 1 && self.tail_bound(n - 1) < tol {
            n -= 1;
        }
        while self.tail_bound(n) >= tol {
            n += 1;
        }
        if n > self.available() {
            return Err(Error::Truncation { needed: n, available: self.available() });
        }
        Ok(n)
    }

    /// The first `terms` terms of the series at `x`.
    pub fn partial_sum(&self, x: &Rational, terms: usize) -> Result<Complex64> {
        if terms > self.available() {
            return Err(Error::Truncation { needed: terms, available: self.available() });
        }
        let (p, q) = x.to_i64_pair().ok_or_else(|| domain(format!("{x} is too large")))?;
        let (p, q) = (p as i128, q as i128);
        let mut acc = ComplexSum::new();
        let mut idx = 0i128;
        let step = p.rem_euclid(q);
        for &c in &self.scaled[..terms] {
            idx += step;
            if idx >= q {
                idx -= q;
            }
            let (s, co) = (2.0 * PI * idx as f64 / q as f64).sin_cos();
            acc.add(Complex64::new(co, s) * c);
        }
        Ok(acc.value())
    }

    /// `g̃(x)` to within `tol`.
    pub fn eval(&self, x: &Rational, tol: f64) -> Result<Truncated> {
        let terms = self.terms_for(tol)?;
        Ok(Truncated { value: self.partial_sum(x, terms)?, bound: self.tail_bound(terms), terms })
    }

    /// `h(x) = g̃(x) - |x|^{k-2} g̃(-1/x)` for `x ≠ 0`; the bound accounts
    /// for both truncations.
    pub fn h(&self, x: &Rational, tol: f64) -> Result<Truncated> {
        if x.is_zero() {
            return Err(domain("h is not defined at 0"));
        }
        let scale = x.abs().to_f64().powi(self.weight as i32 - 2);
        let u = self.eval(x, tol)?;
        let v = self.eval(&x.neg_recip()?, tol)?;
        Ok(Truncated { value: u.value - v.value * scale, bound: u.bound * (1.0 + scale), terms: u.terms })
    }

    /// Engine spec for `g̃`: weight `2 - k`, `θ = 1`, full periodicity with
    /// `f(0) = g̃(0)`. Every evaluation is truncated to `tol`.
    pub fn spec(&self, tol: f64) -> Result<QmfSpec> {
        let f0 = self.eval(&Rational::zero(), tol)?.value;
        let me = self.clone();
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Ok(QmfSpec::new(
            self.weight(),
            RootOfUnity::ONE,
            move |x: &Rational| me.h(x, tol).map(|t| t.value).unwrap_or(nan),
            Periodicity::Full { f0 },
        ))
    }
}

/// `g̃(x)` for the cusp form with coefficients `coeffs` and weight `weight`.
pub fn eichler_tilde(coeffs: &[i128], weight: u32, x: &Rational, tol: f64) -> Result<Truncated> {
    EichlerIntegral::new(coeffs, weight)?.eval(x, tol)
}

/// Least-squares polynomial `Σ c_i xⁱ` of the given degree through the
/// points, by Householder QR.
pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    let cols = degree + 1;
    let rows = xs.len();
    if ys.len() != rows || rows < cols {
        return Err(domain("need at least degree + 1 points"));
    }
    let mut a: Vec<Vec<f64>> = xs.iter().map(|&x| (0..cols).map(|i| x.powi(i as i32)).collect()).collect();
    let mut b = ys.to_vec();
    for j in 0..cols {
        let norm = (j..rows).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(domain("points do not determine the polynomial"));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|t| t * t).sum();
        for c in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * a[i][c]).sum();
            let f = 2.0 * dot / vv;
            for i in j..rows {
                a[i][c] -= f * v[i - j];
            }
        }
        let dot: f64 = (j..rows).map(|i| v[i - j] * b[i]).sum();
        let f = 2.0 * dot / vv;
        for i in j..rows {
            b[i] -= f * v[i - j];
        }
    }
    let mut c = alloc::vec![0.0; cols];
    for j in (0..cols).rev() {
        let s: f64 = (j + 1..cols).map(|i| a[j][i] * c[i]).sum();
        c[j] = (b[j] - s) / a[j][j];
    }
    Ok(c)
}

/// Horner evaluation of `Σ c_i xⁱ`.
pub fn eval_polynomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn delta_at_zero() {
        let d = EichlerIntegral::delta();
        let five = d.partial_sum(&r(0, 1), 5).unwrap();
        let oracle = 1.0 - 24.0 / 2f64.powi(11) + 252.0 / 3f64.powi(11) - 1472.0 / 4f64.powi(11)
            + 4830.0 / 5f64.powi(11);
        assert!((five.re - oracle).abs() < 1e-15 && five.im == 0.0);
        // The quoted 0.98945177 is the exact sum 0.9894517636... rounded up.
        assert!((oracle - 0.98945177).abs() < 1e-8);
        let full = d.eval(&r(0, 1), 1e-12).unwrap();
        assert!((full.value.re - five.re).abs() <= d.tail_bound(5));
    }

    #[test]
    fn truncation_is_reported() {
        let short = EichlerIntegral::new(&ramanujan_tau(20)[1..], 12).unwrap();
        assert!(matches!(short.eval(&r(1, 3), 1e-12), Err(Error::Truncation { available: 20, .. })));
        assert!(short.eval(&r(1, 3), 1e-3).is_ok());
        assert!(EichlerIntegral::new(&[1], 13).is_err());
    }

    #[test]
    fn periodic_and_tail() {
        let d = EichlerIntegral::delta();
        let (u, v) = (d.eval(&r(2, 7), 1e-12).unwrap(), d.eval(&r(9, 7), 1e-12).unwrap());
        assert_eq!(u.value, v.value);
        assert!((d.tail_bound(10) - 0.5e-4).abs() < 1e-18);
        assert!(d.tail_bound(d.terms_for(1e-10).unwrap()) < 1e-10);
    }

    #[test]
    fn h_is_polynomial() {
        let d = EichlerIntegral::delta();
        let tol = 1e-12;
        let sample = |n: i64, q: i64| {
            let x = r(n, q);
            (x.to_f64(), d.h(&x, tol).unwrap().value)
        };
        let fit: Vec<(f64, Complex64)> = (1..=50).map(|i| sample(if i % 2 == 0 { i } else { -i }, 53)).collect();
        let xs: Vec<f64> = fit.iter().map(|p| p.0).collect();
        let re = fit_polynomial(&xs, &fit.iter().map(|p| p.1.re).collect::<Vec<_>>(), 10).unwrap();
        let im = fit_polynomial(&xs, &fit.iter().map(|p| p.1.im).collect::<Vec<_>>(), 10).unwrap();
        for i in 1..=20 {
            let (x, h) = sample(if i % 3 == 0 { -i } else { i }, 23);
            let p = Complex64::new(eval_polynomial(&re, x), eval_polynomial(&im, x));
            assert!((p - h).norm() < 1e-6, "{x}: {p} vs {h}");
        }
        assert!(d.h(&r(1, 1), tol).unwrap().value.norm() < 1e-12);
    }

    #[test]
    fn engine_reciprocity() {
        let d = EichlerIntegral::delta();
        let spec = d.spec(1e-12).unwrap();
        for q in 1..20i64 {
            for p in -2 * q..2 * q {
                if num_integer::Integer::gcd(&p, &q) != 1 {
                    continue;
                }
                let x = r(p, q);
                let u = crate::engine::eval_f(&spec, &x);
                let v = d.eval(&x, 1e-12).unwrap().value;
                assert!((u - v).norm() < 1e-9, "{x}: {u} vs {v}");
            }
        }
    }
}

//! Double-double arithmetic: just enough to evaluate the large, mutually
//! cancelling terms of the Euler–Maclaurin sum for `Re(s) < 1`.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.

use core::ops::{Add, Div, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd { hi: 6.931_471_805_599_452_862e-1, lo: 2.319_046_813_846_299_558e-17 };
const FRAC_PI_2: Dd = Dd { hi: 1.570_796_326_794_896_558e0, lo: 6.123_233_995_736_766_036e-17 };

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        quick_two_sum(p, e + self.lo * b)
    }

    /// Multiplication by a power of two, exact.
    fn ldexp(self, k: i32) -> Dd {
        let f = 2f64.powi(k);
        Dd { hi: self.hi * f, lo: self.lo * f }
    }

    pub fn exp(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ONE;
        }
        let k = (self.hi / LN2.hi).round();
        // |r| ≤ ln2/2, then scaled by 2^-5 for a short Taylor series.
        let r = (self - LN2.mul_f64(k)).ldexp(-5);
        let mut term = r;
        let mut sum = r;
        for n in 2..=11 {
            term = term * r / Dd::from_f64(n as f64);
            sum = sum + term;
        }
        // (1 + sum)^32 = 1 + expm1, computed without losing the small part.
        for _ in 0..5 {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + Dd::ONE).ldexp(k as i32)
    }

    /// `a + b` without rounding.
    pub fn sum(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    /// `ln(y)` for `y > 0`: one Newton step on `exp` from the binary64 value.
    pub fn ln(y: Dd) -> Dd {
        let x = Dd::from_f64(y.hi.ln());
        x + (y * (-x).exp() - Dd::ONE)
    }

    /// `(sin, cos)`.
    pub fn sin_cos(self) -> (Dd, Dd) {
        let n = (self.hi / FRAC_PI_2.hi).round();
        let r = self - FRAC_PI_2.mul_f64(n);
        let r2 = r * r;
        let mut s_term = r;
        let mut sin = r;
        let mut c_term = Dd::ONE;
        let mut cos = Dd::ONE;
        for k in 1..=13 {
            let k2 = 2.0 * k as f64;
            s_term = -(s_term * r2 / Dd::from_f64(k2 * (k2 + 1.0)));
            c_term = -(c_term * r2 / Dd::from_f64(k2 * (k2 - 1.0)));
            sin = sin + s_term;
            cos = cos + c_term;
        }
        match (n as i64).rem_euclid(4) {
            0 => (sin, cos),
            1 => (cos, -sin),
            2 => (-sin, -cos),
            _ => (-cos, sin),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2) + Dd::from_f64(q3)
    }
}

/// A complex number with double-double parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    /// `t^{-s}` for real `t > 0`, `s = σ + iτ`.
    pub fn real_pow_neg(t: Dd, sigma: f64, tau: f64) -> CDd {
        let l = Dd::ln(t);
        let mag = (-l.mul_f64(sigma)).exp();
        if tau == 0.0 {
            return CDd { re: mag, im: Dd::ZERO };
        }
        let (sin, cos) = (-l.mul_f64(tau)).sin_cos();
        CDd { re: mag * cos, im: mag * sin }
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re + o.re, im: self.im + o.im }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    pub fn scale(self, f: Dd) -> CDd {
        CDd { re: self.re * f, im: self.im * f }
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re * o.re + o.im * o.im;
        CDd {
            re: (self.re * o.re + self.im * o.im) / den,
            im: (self.im * o.re - self.re * o.im) / den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, want_hi: f64, want_lo: f64, tol: f64) {
        let d = (a.hi - want_hi) + (a.lo - want_lo);
        assert!(d.abs() <= tol * want_hi.abs(), "{a:?} vs {want_hi:e} + {want_lo:e}");
    }

    #[test]
    fn constants_and_functions() {
        // e = 2.718281828459045 + 1.4456468917292502e-16
        close(Dd::ONE.exp(), 2.718_281_828_459_045, 1.445_646_891_729_250_2e-16, 1e-30);
        close(Dd::ln(Dd::from_f64(2.0)), LN2.hi, LN2.lo, 1e-30);
        // ln(1 + 2^-60) = 2^-60 - 2^-121 + ..., to absolute accuracy.
        let l = Dd::ln(Dd::sum(1.0, 2f64.powi(-60)));
        assert!(((l.hi - 2f64.powi(-60)) + l.lo).abs() < 1e-35);
        // sin(1) = 0.8414709848078965 + 1.776845092935536e-18
        let (s, c) = Dd::ONE.sin_cos();
        close(s, 0.841_470_984_807_896_5, 1.776_845_092_935_536e-18, 1e-30);
        close(s * s + c * c, 1.0, 0.0, 1e-30);
        let (s, _) = FRAC_PI_2.mul_f64(3.0).sin_cos();
        close(s, -1.0, 0.0, 1e-30);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        close(a.mul_f64(3.0), 1.0, 0.0, 1e-31);
        let p = CDd::real_pow_neg(Dd::from_f64(7.25), -2.5, 0.7);
        let q = p.div(p);
        close(q.re, 1.0, 0.0, 1e-30);
        assert!(q.im.to_f64().abs() < 1e-30);
    }
}

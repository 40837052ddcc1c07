//! Zagier's `A_{k,D}`
//!
//! ```text
//! A_{k,D}(x) = Σ_{b² - 4ac = D, a < 0, Q(x) > 0} Q(x)^k,   Q(x) = ax² + bx + c
//! ```
//!
//! Eliminating `c`, a form with leading coefficient `a = -A` contributes
//! `Q(x) = (D - (b - 2Ax)²)/(4A)` whenever `b² ≡ D (mod 4A)` and
//! `(b - 2Ax)² < D`. Each `A` contributes at most `2⌈√D⌉` forms of size at
//! most `D/(4A)`, which bounds the tail.

use alloc::format;

use num_integer::Roots;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::rational::Rational;
use crate::sum::NeumaierSum;

/// Which middle coefficients `b` enter the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BRange {
    /// Every integer `b`; the literal definition.
    All,
    /// Only `b ≥ 0`, as in the divisor-sum identity at `x = 0`.
    NonNegative,
}

/// A truncated sum with a bound on the omitted part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AkdValue {
    pub value: f64,
    pub tail_bound: f64,
}

fn check_params(k: u32, d: i64) -> Result<()> {
    if k < 5 || k % 2 == 0 {
        return Err(domain(format!("k must be odd and at least 5, got {k}")));
    }
    if d <= 0 || d.rem_euclid(4) > 1 {
        return Err(domain(format!("D must be a positive discriminant ≡ 0, 1 mod 4, got {d}")));
    }
    let r = d.sqrt();
    if r * r == d {
        return Err(domain(format!("D = {d} is a square")));
    }
    Ok(())
}

/// `Σ_{A > depth} 2⌈√D⌉ (D/(4A))^k ≤ 2⌈√D⌉ (D/4)^k depth^{1-k}/(k-1)`.
pub fn akd_tail_bound(k: u32, d: i64, depth: u64) -> f64 {
    let count = 2.0 * (d as f64).sqrt().ceil();
    let kf = k as f64;
    count * (d as f64 / 4.0).powf(kf) * (depth.max(1) as f64).powf(1.0 - kf) / (kf - 1.0)
}

/// `A_{k,D}(x)` summed over `1 ≤ A ≤ depth`.
pub fn a_kd(k: u32, d: i64, x: &Rational, depth: u64, range: BRange) -> Result<AkdValue> {
    check_params(k, d)?;
    let (p, q) = x.to_i64_pair().ok_or_else(|| domain(format!("{x} is too large")))?;
    let (p, q, di) = (p as i128, q as i128, d as i128);
    let xf = x.to_f64();
    let root = (d as f64).sqrt();
    let mut acc = NeumaierSum::new();
    for big_a in 1..=depth as i128 {
        let modulus = 4 * big_a;
        let centre = 2.0 * big_a as f64 * xf;
        let lo = (centre - root).floor() as i128;
        let hi = (centre + root).ceil() as i128;
        for b in lo..=hi {
            if range == BRange::NonNegative && b < 0 {
                continue;
            }
            if (b * b - di).rem_euclid(modulus) != 0 {
                continue;
            }
            // Q(x) = (D q² - (bq - 2Ap)²) / (4A q²), exactly signed.
            let t = b * q - 2 * big_a * p;
            let num = di * q * q - t * t;
            if num <= 0 {
                continue;
            }
            let value = num as f64 / (modulus * q * q) as f64;
            acc.add(value.powi(k as i32));
        }
    }
    Ok(AkdValue { value: acc.value(), tail_bound: akd_tail_bound(k, d, depth) })
}

/// Smallest depth whose tail bound is below `tol`.
pub fn akd_depth_for(k: u32, d: i64, tol: f64) -> Result<u64> {
    check_params(k, d)?;
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    let kf = k as f64;
    let count = 2.0 * (d as f64).sqrt().ceil();
    let guess = (count * (d as f64 / 4.0).powf(kf) / ((kf - 1.0) * tol)).powf(1.0 / (kf - 1.0));
    let mut depth = guess.ceil().max(1.0) as u64;
    while akd_tail_bound(k, d, depth) >= tol {
        depth += 1;
    }
    Ok(depth)
}

/// `Σ_{0 ≤ b < √D, b² ≡ D (mod 4)} σ_k((D - b²)/4)`, the divisor-sum side
/// of the identity at `x = 0`.
pub fn akd_divisor_side(k: u32, d: i64) -> Result<num_bigint::BigUint> {
    check_params(k, d)?;
    let mut total = num_bigint::BigUint::default();
    let mut b = 0i64;
    while b * b < d {
        if (d - b * b) % 4 == 0 {
            total += crate::special::sigma_div(k, ((d - b * b) / 4) as u64);
        }
        b += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn conventions_at_zero() {
        let all = a_kd(5, 5, &r(0, 1), 50, BRange::All).unwrap();
        let half = a_kd(5, 5, &r(0, 1), 50, BRange::NonNegative).unwrap();
        assert_eq!(all.value, 2.0);
        assert_eq!(half.value, 1.0);
        assert_eq!(akd_divisor_side(5, 5).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn brute_force_enumeration() {
        // Enumerate (a, b, c) directly and compare.
        for &(k, d) in &[(5u32, 5i64), (5, 8), (7, 13)] {
            for &(p, q) in &[(0i64, 1i64), (1, 3), (-2, 5), (7, 4)] {
                let xf = p as f64 / q as f64;
                let mut direct = 0.0;
                for a in -30i64..0 {
                    for b in -200i64..200 {
                        if (b * b - d) % (4 * a) != 0 {
                            continue;
                        }
                        let c = (b * b - d) / (4 * a);
                        let v = a as f64 * xf * xf + b as f64 * xf + c as f64;
                        if v > 1e-12 {
                            direct += v.powi(k as i32);
                        }
                    }
                }
                let got = a_kd(k, d, &r(p, q), 30, BRange::All).unwrap().value;
                assert!((got - direct).abs() < 1e-9 * direct.max(1.0), "k={k} D={d} x={p}/{q}: {got} vs {direct}");
            }
        }
    }

    #[test]
    fn depth_and_errors() {
        let depth = akd_depth_for(5, 5, 1e-8).unwrap();
        assert!(akd_tail_bound(5, 5, depth) < 1e-8);
        assert!(akd_tail_bound(5, 5, depth - 1) >= 1e-8);
        assert!(a_kd(5, 9, &r(0, 1), 5, BRange::All).is_err());
        assert!(a_kd(5, 7, &r(0, 1), 5, BRange::All).is_err());
        assert!(a_kd(4, 5, &r(0, 1), 5, BRange::All).is_err());
    }

    #[test]
    fn continuity_probe() {
        // 1/n and the golden-ratio convergents F_{n-1}/F_n both approach
        // points where the sum is continuous; nearby rationals agree.
        let depth = akd_depth_for(5, 5, 1e-10).unwrap();
        let (mut f0, mut f1) = (1i64, 1i64);
        let mut prev: Option<f64> = None;
        for _ in 0..25 {
            let (a, b) = (f1, f0 + f1);
            let v = a_kd(5, 5, &r(a, b), depth, BRange::All).unwrap().value;
            if let Some(p) = prev {
                let gap = (v - p).abs();
                assert!(gap < 1e-3 || b < 100, "{a}/{b}: {gap}");
            }
            prev = Some(v);
            f0 = f1;
            f1 = b;
        }
    }
}

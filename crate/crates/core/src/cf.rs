//! Continued fractions of rationals, the Gauss map `T(x) = {1/x}`, the
//! reversal `x ↦ x̄`, Dedekind sums and the phase `σ(x)`.
//!
//! Everything here is exact: quotients, denominators and sums are carried as
//! arbitrary-precision integers or [`Rational`]s.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};
use crate::rational::Rational;

/// `[b0; b1, ..., br]` with every `bj ≥ 1` for `j ≥ 1`.
///
/// `canonical` is set for the minimal-length expansion, i.e. `br ≠ 1`
/// whenever `r > 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub b0: BigInt,
    pub quotients: Vec<BigUint>,
    pub canonical: bool,
}

/// A sequence of positive denominators: either the backward denominators
/// `u_0, ..., u_r` of a rational, or the continuants `v_0, ..., v_r` of an
/// expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenominatorSeq(pub Vec<BigUint>);

impl DenominatorSeq {
    pub fn as_slice(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Small-integer view, when every entry fits in `u64`.
    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|v| v.to_u64()).collect()
    }
}

impl CfExpansion {
    /// Builds an expansion from its parts, checking `bj ≥ 1`. The
    /// `canonical` flag is derived from the quotient list.
    pub fn from_parts(b0: impl Into<BigInt>, quotients: Vec<BigUint>) -> Result<Self> {
        if quotients.iter().any(|b| b.is_zero()) {
            return Err(domain("partial quotients must be positive"));
        }
        let canonical = quotients.len() <= 1 || !quotients.last().unwrap().is_one();
        Ok(CfExpansion { b0: b0.into(), quotients, canonical })
    }

    /// Convenience constructor for small quotients.
    pub fn from_u64(b0: i64, quotients: &[u64]) -> Result<Self> {
        Self::from_parts(b0, quotients.iter().map(|&b| BigUint::from(b)).collect())
    }

    /// Number of partial quotients `r`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// Exact value of the expansion.
    pub fn value(&self) -> Rational {
        // Backward evaluation: t = b_r, t = b_j + 1/t, ..., x = b0 + 1/t.
        let mut p = BigInt::one();
        let mut q = BigInt::zero();
        for b in self.quotients.iter().rev() {
            // p/q ← b + q/p
            let b = BigInt::from_biguint(Sign::Plus, b.clone());
            let np = &b * &p + &q;
            q = p;
            p = np;
        }
        // value = b0 + q/p
        let num = &self.b0 * &p + &q;
        Rational::from_coprime(num, p)
    }

    /// The same number expanded with an odd number of quotients, using
    /// `[..., b_r] ↔ [..., b_r - 1, 1]`. Integers `n` become `[n - 1; 1]`.
    pub fn to_odd(&self) -> Self {
        if self.len() % 2 == 1 {
            return self.clone();
        }
        let mut quotients = self.quotients.clone();
        let mut b0 = self.b0.clone();
        match quotients.last_mut() {
            None => {
                b0 -= 1;
                quotients.push(BigUint::one());
            }
            Some(last) if last.is_one() => {
                // [..., c, 1] with even length: merge into [..., c + 1].
                quotients.pop();
                *quotients.last_mut().unwrap() += 1u32;
            }
            Some(last) => {
                *last -= 1u32;
                quotients.push(BigUint::one());
            }
        }
        let canonical = quotients.len() <= 1 || !quotients.last().unwrap().is_one();
        CfExpansion { b0, quotients, canonical }
    }

    /// The reversed quotient list `[0; b_r, ..., b_1]`.
    pub fn reversed(&self) -> Self {
        let quotients: Vec<BigUint> = self.quotients.iter().rev().cloned().collect();
        let canonical = quotients.len() <= 1 || !quotients.last().unwrap().is_one();
        CfExpansion { b0: BigInt::zero(), quotients, canonical }
    }

    /// The prefix `[b0; b1, ..., bj]`.
    pub fn truncate(&self, j: usize) -> Self {
        let quotients = self.quotients[..j.min(self.len())].to_vec();
        let canonical = quotients.len() <= 1 || !quotients.last().unwrap().is_one();
        CfExpansion { b0: self.b0.clone(), quotients, canonical }
    }
}

/// Canonical continued fraction expansion by Euclid's algorithm.
pub fn cf_expand(x: &Rational) -> CfExpansion {
    let b0 = x.floor();
    let mut a = x.num() - &b0 * x.den();
    let mut q = x.den().clone();
    let mut quotients = Vec::new();
    // Invariant: the remaining fractional part is a/q with 0 ≤ a < q.
    while !a.is_zero() {
        let (b, rem) = q.div_rem(&a);
        quotients.push(b.to_biguint().expect("positive quotient"));
        q = a;
        a = rem;
    }
    CfExpansion { b0, quotients, canonical: true }
}

/// Odd-length expansion of `x ∈ (0, 1]`; `1` is `[0; 1]`.
pub fn cf_odd(x: &Rational) -> Result<CfExpansion> {
    if !x.is_positive() || *x > 1 {
        return Err(domain("cf_odd requires 0 < x ≤ 1"));
    }
    if *x == 1 {
        return CfExpansion::from_u64(0, &[1]);
    }
    Ok(cf_expand(x).to_odd())
}

/// Backward denominators `u_0, ..., u_r` of an expansion of a number in
/// `(0, 1)`: `T^j(x) = u_{j+1}/u_j`, `u_0 = den(x)`, `u_r = 1`.
///
/// For a non-canonical expansion ending in `1` this yields the extended
/// sequence with `u_{r} = u_{r-1} = 1`.
pub fn backward_denominators(cf: &CfExpansion) -> DenominatorSeq {
    let r = cf.len();
    let mut u = alloc::vec![BigUint::zero(); r + 1];
    u[r] = BigUint::one();
    let mut next = BigUint::zero(); // u_{j+2}, starting from u_{r+1} := 0
    for j in (0..r).rev() {
        let uj = &cf.quotients[j] * &u[j + 1] + &next;
        next = u[j + 1].clone();
        u[j] = uj;
    }
    DenominatorSeq(u)
}

/// The Gauss-map orbit of `x ∈ (0, 1)`.
///
/// Returns the backward denominators `u_0, ..., u_r` and the iterates
/// `T(x), T^2(x), ..., T^r(x) = 0`.
pub fn gauss_orbit(x: &Rational) -> Result<(DenominatorSeq, Vec<Rational>)> {
    if !x.is_positive() || *x >= 1 {
        return Err(domain("gauss_orbit requires 0 < x < 1"));
    }
    let u = backward_denominators(&cf_expand(x));
    let r = u.len() - 1;
    let iterates = (1..=r)
        .map(|j| {
            let num = if j < r { u.0[j + 1].clone() } else { BigUint::zero() };
            Rational::from_coprime(num.into(), u.0[j].clone().into())
        })
        .collect();
    Ok((u, iterates))
}

/// One step of the Gauss map, `T(x) = {1/x}` for `x ∈ (0, 1)`.
pub fn gauss_map(x: &Rational) -> Result<Rational> {
    if !x.is_positive() || *x >= 1 {
        return Err(domain("gauss_map requires 0 < x < 1"));
    }
    Ok(x.recip()?.fract())
}

/// Continuants `v_0 = 1, v_j = b_j v_{j-1} + v_{j-2}`: the denominators of
/// the convergents `[0; b_1, ..., b_j]`.
pub fn continuants(cf: &CfExpansion) -> DenominatorSeq {
    let mut v = Vec::with_capacity(cf.len() + 1);
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    v.push(cur.clone());
    for b in &cf.quotients {
        let next = b * &cur + &prev;
        prev = core::mem::replace(&mut cur, next);
        v.push(cur.clone());
    }
    DenominatorSeq(v)
}

/// `x̄ = ā/q` for `x = a/q ∈ (0, 1]`, where `aā ≡ 1 (mod q)` and
/// `ā ∈ (0, q]`. For `q = 1` this is `1`.
pub fn bar_invert(x: &Rational) -> Result<Rational> {
    if !x.is_positive() || *x > 1 {
        return Err(domain("bar_invert requires 0 < x ≤ 1"));
    }
    let q = x.den();
    if q.is_one() {
        return Ok(Rational::one());
    }
    let inv = mod_inverse(x.num(), q).expect("reduced fraction");
    Ok(Rational::from_coprime(inv, q.clone()))
}

/// Inverse of `a` modulo `m > 1`, in `[1, m)`.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Dedekind sum `s(b/q) = Σ_{m=1}^{q-1} ((m/q)) ((mb/q))`, exactly.
///
/// Moderate denominators use the defining sum in 128-bit integers; larger
/// ones fall back to the reciprocity recursion.
pub fn dedekind_sum(x: &Rational) -> Rational {
    match (x.num().to_i64(), x.den().to_u64()) {
        (Some(b), Some(q)) if q <= DIRECT_SUM_LIMIT => dedekind_sum_direct(b, q),
        _ => dedekind_sum_reciprocity(x.num(), x.den()),
    }
}

const DIRECT_SUM_LIMIT: u64 = 1 << 20;

/// Defining sum. With `((t)) = (2{t} - 1)/2` off the integers, the sum is
/// `Σ (2m - q)(2(mb mod q) - q) / (4q²)`.
pub(crate) fn dedekind_sum_direct(b: i64, q: u64) -> Rational {
    if q == 1 {
        return Rational::zero();
    }
    let qi = q as i128;
    let b = (b as i128).rem_euclid(qi);
    let mut acc: i128 = 0;
    let mut mb: i128 = 0;
    for m in 1..qi {
        mb += b;
        if mb >= qi {
            mb -= qi;
        }
        acc += (2 * m - qi) * (2 * mb - qi);
    }
    Rational::new(BigInt::from(acc), BigInt::from(4 * qi * qi)).unwrap()
}

/// `s(b, q) + s(q, b) = -1/4 + (b/q + q/b + 1/(bq))/12`, applied along the
/// Euclidean algorithm.
pub(crate) fn dedekind_sum_reciprocity(b: &BigInt, q: &BigInt) -> Rational {
    let mut b = b.mod_floor(q);
    let mut q = q.clone();
    let mut sign = 1i32;
    let mut acc = Rational::zero();
    let twelfth = Rational::new(1, 12).unwrap();
    let quarter = Rational::new(1, 4).unwrap();
    while !b.is_zero() && !q.is_one() {
        // s(b, q) = -s(q mod b, b) - 1/4 + (b/q + q/b + 1/(bq))/12
        let bq = Rational::new(b.clone(), q.clone()).unwrap();
        let qb = Rational::new(q.clone(), b.clone()).unwrap();
        let inv = Rational::new(1, &b * &q).unwrap();
        let term = &(&(&(&bq + &qb) + &inv) * &twelfth) - &quarter;
        acc = if sign > 0 { &acc + &term } else { &acc - &term };
        sign = -sign;
        let r = q.mod_floor(&b);
        q = b;
        b = r;
    }
    acc
}

/// `σ(x) = 3 + Σ_{j=1}^r (-1)^j b_j` over the odd-length expansion of
/// `x ∈ (0, 1]`.
pub fn sigma_phase(x: &Rational) -> Result<BigInt> {
    let cf = cf_odd(x)?;
    Ok(alternating_sum(&cf.quotients) + 3)
}

/// `Σ_{j=1}^r (-1)^j b_j`.
pub(crate) fn alternating_sum(quotients: &[BigUint]) -> BigInt {
    quotients.iter().enumerate().fold(BigInt::zero(), |acc, (i, b)| {
        let b = BigInt::from_biguint(Sign::Plus, b.clone());
        if i % 2 == 0 {
            acc - b
        } else {
            acc + b
        }
    })
}

/// Membership in `𝔗(B)`: `b_j ≤ max(B, j (ln j)²)` for every `1 ≤ j ≤ r`.
pub fn in_frak_t(cf: &CfExpansion, bound: f64) -> bool {
    cf.quotients
        .iter()
        .enumerate()
        .all(|(i, b)| b.to_f64().unwrap_or(f64::INFINITY) <= frak_t_threshold(i + 1, bound))
}

/// `max(B, j (ln j)²)`; the `j = 1` term is `B`.
pub fn frak_t_threshold(j: usize, bound: f64) -> f64 {
    let lj = num_traits::Float::ln(j as f64);
    bound.max(j as f64 * lj * lj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn qs(cf: &CfExpansion) -> Vec<u64> {
        cf.quotients.iter().map(|b| b.to_u64().unwrap()).collect()
    }

    #[test]
    fn expand_examples() {
        let cf = cf_expand(&r(7, 17));
        assert_eq!(cf.b0, BigInt::zero());
        assert_eq!(qs(&cf), vec![2, 2, 3]);
        let one = cf_expand(&r(1, 1));
        assert_eq!(one.b0, BigInt::one());
        assert!(one.quotients.is_empty());
        assert_eq!(qs(&cf_expand(&r(5, 7))), vec![1, 2, 2]);
        let neg = cf_expand(&r(-7, 3));
        assert_eq!(neg.b0, BigInt::from(-3));
        assert_eq!(neg.value(), r(-7, 3));
    }

    #[test]
    fn odd_examples() {
        assert_eq!(qs(&cf_odd(&r(7, 17)).unwrap()), vec![2, 2, 3]);
        let two_fifths = cf_odd(&r(2, 5)).unwrap();
        assert_eq!(qs(&two_fifths), vec![2, 1, 1]);
        assert!(!two_fifths.canonical);
        assert_eq!(two_fifths.value(), r(2, 5));
        assert_eq!(qs(&cf_odd(&r(1, 1)).unwrap()), vec![1]);
        assert!(cf_odd(&r(0, 1)).is_err());
        assert!(cf_odd(&r(3, 2)).is_err());
    }

    #[test]
    fn integer_to_odd() {
        let cf = cf_expand(&r(4, 1)).to_odd();
        assert_eq!(cf.b0, BigInt::from(3));
        assert_eq!(qs(&cf), vec![1]);
        assert_eq!(cf.value(), r(4, 1));
    }

    #[test]
    fn orbit_examples() {
        let (u, t) = gauss_orbit(&r(7, 17)).unwrap();
        assert_eq!(u.to_u64().unwrap(), vec![17, 7, 3, 1]);
        assert_eq!(t, vec![r(3, 7), r(1, 3), r(0, 1)]);
        let (u, t) = gauss_orbit(&r(1, 2)).unwrap();
        assert_eq!(u.to_u64().unwrap(), vec![2, 1]);
        assert_eq!(t, vec![r(0, 1)]);
        assert_eq!(gauss_map(&r(7, 17)).unwrap(), r(3, 7));
    }

    #[test]
    fn continuant_examples() {
        let v = continuants(&CfExpansion::from_u64(0, &[2, 2, 3]).unwrap());
        assert_eq!(v.to_u64().unwrap(), vec![1, 2, 5, 17]);
        let v = continuants(&CfExpansion::from_u64(0, &[1]).unwrap());
        assert_eq!(v.to_u64().unwrap(), vec![1, 1]);
    }

    #[test]
    fn bar_examples() {
        assert_eq!(bar_invert(&r(3, 7)).unwrap(), r(5, 7));
        assert_eq!(bar_invert(&r(1, 2)).unwrap(), r(1, 2));
        assert_eq!(bar_invert(&r(2, 5)).unwrap(), r(3, 5));
        assert_eq!(bar_invert(&r(1, 1)).unwrap(), r(1, 1));
        assert_eq!(bar_invert(&r(7, 17)).unwrap(), r(5, 17));
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(&r(1, 2)), r(0, 1));
        assert_eq!(dedekind_sum(&r(1, 3)), r(1, 18));
        assert_eq!(dedekind_sum(&r(2, 3)), r(-1, 18));
        assert_eq!(dedekind_sum(&r(5, 1)), r(0, 1));
    }

    #[test]
    fn dedekind_paths_agree() {
        for q in 1..120i64 {
            for b in -q..2 * q {
                if b.gcd(&q) != 1 {
                    continue;
                }
                assert_eq!(
                    dedekind_sum_direct(b, q as u64),
                    dedekind_sum_reciprocity(&BigInt::from(b), &BigInt::from(q)),
                    "b={b} q={q}"
                );
            }
        }
    }

    #[test]
    fn sigma_matches_dedekind_sum() {
        // σ(x) = x + x̄ - 12 s(x); at 1/3: 0 = 2/3 - 12/18.
        for q in 1..80i64 {
            for b in 1..=q {
                if b.gcd(&q) != 1 {
                    continue;
                }
                let x = r(b, q);
                let rhs = &(&x + &bar_invert(&x).unwrap()) - &(&dedekind_sum(&x) * &r(12, 1));
                assert_eq!(Rational::from_integer(sigma_phase(&x).unwrap()), rhs, "{x}");
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_phase(&r(1, 2)).unwrap(), BigInt::from(1));
        assert_eq!(sigma_phase(&r(1, 1)).unwrap(), BigInt::from(2));
        // 7/17 = [0; 2, 2, 3]: 3 - 2 + 2 - 3 = 0
        assert_eq!(sigma_phase(&r(7, 17)).unwrap(), BigInt::zero());
    }

    #[test]
    fn frak_t_examples() {
        let ones = CfExpansion::from_u64(0, &[1; 40]).unwrap();
        assert!(in_frak_t(&ones, 1.0));
        let spike = CfExpansion::from_u64(0, &[1, 1, 1, 1, 100]).unwrap();
        assert!(!in_frak_t(&spike, 3.0));
        assert!((frak_t_threshold(5, 3.0) - 12.95).abs() < 0.01);
        let single = CfExpansion::from_u64(0, &[4]).unwrap();
        assert!(in_frak_t(&single, 4.0));
        assert!(!in_frak_t(&single, 3.5));
    }
}

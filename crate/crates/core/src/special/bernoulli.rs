use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::rational::Rational;

/// `B_0, ..., B_n` from `Σ_{j=0}^{n} C(n+1, j) B_j = 0` (so `B_1 = -1/2`).
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::from_integer(BigInt::from(1)));
    for m in 1..=n {
        // binomials C(m+1, j) for j = 0..m
        let mut binom = BigInt::from(1);
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * &binom;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b.into_iter().map(Rational::from).collect()
}

/// The Bernoulli number `B_n` as an exact rational.
pub fn bernoulli(n: usize) -> Rational {
    bernoulli_table(n).pop().expect("non-empty table")
}

/// `B_{2m} / (2m)!` for `m = 0..=max_m`, rounded to binary64.
pub(crate) fn even_bernoulli_over_factorial(max_m: usize) -> Vec<f64> {
    let table = bernoulli_table(2 * max_m);
    let mut fact = BigInt::from(1);
    let mut out = Vec::with_capacity(max_m + 1);
    for (n, b) in table.iter().enumerate() {
        if n > 0 {
            fact *= BigInt::from(n);
        }
        if n % 2 == 0 {
            let r = b.as_big_rational() / BigRational::from_integer(fact.clone());
            out.push(r.to_f64().unwrap_or(0.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(bernoulli(0), Rational::one());
        assert_eq!(bernoulli(1), Rational::new(-1, 2).unwrap());
        assert_eq!(bernoulli(2), Rational::new(1, 6).unwrap());
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(12), Rational::new(-691, 2730).unwrap());
    }

    #[test]
    fn odd_indices_vanish() {
        let t = bernoulli_table(40);
        for n in (3..=40).step_by(2) {
            assert!(t[n].is_zero(), "B_{n}");
        }
    }

    #[test]
    fn scaled_even_values() {
        let c = even_bernoulli_over_factorial(3);
        assert!((c[1] - 1.0 / 12.0).abs() < 1e-17);
        assert!((c[2] + 1.0 / 720.0).abs() < 1e-18);
    }
}

//! Exact reduced fractions over arbitrary-precision integers.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// A reduced fraction `num/den` with `den ≥ 1`; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    /// Reduces `p/q` to lowest terms with a positive denominator.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(domain("zero denominator"));
        }
        Ok(Rational(BigRational::new(p.into(), q)))
    }

    /// Builds `p/q` from a pair already known to be coprime with `q > 0`.
    pub(crate) fn from_coprime(p: BigInt, q: BigInt) -> Self {
        debug_assert!(q.is_positive() && p.gcd(&q).is_one());
        Rational(BigRational::new_raw(p, q))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn num(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn den(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.num().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Fractional part `{x} = x - ⌊x⌋ ∈ [0, 1)`.
    pub fn fract(&self) -> Self {
        Rational(&self.0 - self.0.floor())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(domain("reciprocal of zero"));
        }
        Ok(Rational(self.0.recip()))
    }

    /// `-1/x`, the image under the inversion `z ↦ -1/z`.
    pub fn neg_recip(&self) -> Result<Self> {
        Ok(-self.recip()?)
    }

    pub fn to_f64(&self) -> f64 {
        // Ratio::to_f64 handles huge numerators and denominators correctly.
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Small-denominator view `(num, den)` when both fit in `i64`.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.num().to_i64()?, self.den().to_i64()?))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Parses `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| domain(alloc::format!("not an integer: {t:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Rational::new(parse(p)?, parse(q)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && self.num() == &BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let x = r(6, 4);
        assert_eq!((x.num().clone(), x.den().clone()), (BigInt::from(3), BigInt::from(2)));
        let z = r(0, 5);
        assert_eq!((z.num().clone(), z.den().clone()), (BigInt::from(0), BigInt::from(1)));
        let y = r(-3, -9);
        assert_eq!((y.num().clone(), y.den().clone()), (BigInt::from(1), BigInt::from(3)));
    }

    #[test]
    fn zero_denominator_is_domain_error() {
        assert!(matches!(Rational::new(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_and_fract() {
        let x: Rational = "-7/3".parse().unwrap();
        assert_eq!(x.floor(), BigInt::from(-3));
        assert_eq!(x.fract(), r(2, 3));
        assert_eq!("5".parse::<Rational>().unwrap(), 5);
        assert!("1/x".parse::<Rational>().is_err());
    }
}

//! Evaluation of a quantum modular form from its period function.
//!
//! A [`QmfSpec`] fixes the weight `k`, a twist `θ`, the period function `h`
//! and a periodicity rule, with the convention
//!
//! ```text
//! h(x) = f(x) - θ^{3 sgn(x)} |x|^{-k} f(-1/x).
//! ```
//!
//! Iterating this along the continued fraction `x = [0; b_1, ..., b_r]`
//! gives the finite expansion
//!
//! ```text
//! f(x) = Σ_{j<r} θ_j (u_j/u_0)^{-k} h((-1)^j u_{j+1}/u_j) + θ_r u_0^k F
//! ```
//!
//! where `u_j` are the backward denominators, `θ_j = θ^{e_j}` with
//! `e_j = Σ_{i≤j} (-1)^i b_i (+3 for odd j)`, and `F` is the trailing
//! constant described at [`Periodicity`]. Powers `|x|^{-k}` always use the
//! real logarithm of `|x| > 0`.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, TAU};
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_integer::Integer;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};
use spin::Once;

use crate::cf::{backward_denominators, cf_expand, cf_odd, CfExpansion};
use crate::error::{domain, Result};
use crate::rational::Rational;
use crate::sum::ComplexSum;

/// `θ = e(t/N)` with `e(z) = exp(2πiz)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    t: u64,
    n: u64,
}

impl RootOfUnity {
    pub const ONE: Self = RootOfUnity { t: 0, n: 1 };

    /// `e(t/N)`; `t` is reduced modulo `N`, the fraction `t/N` is not.
    pub fn new(t: i64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("root of unity needs N ≥ 1"));
        }
        let t = (t as i128).rem_euclid(n as i128) as u64;
        Ok(RootOfUnity { t, n })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn is_one(&self) -> bool {
        self.t == 0
    }

    /// `θ^e` for an exponent already reduced modulo `N`.
    pub fn pow_reduced(&self, e: u64) -> Complex64 {
        if self.t == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let idx = ((self.t as u128 * e as u128) % self.n as u128) as f64;
        let (s, c) = (TAU * idx / self.n as f64).sin_cos();
        Complex64::new(c, s)
    }

    /// `θ^e` for any integer exponent.
    pub fn pow(&self, e: i64) -> Complex64 {
        self.pow_reduced(self.reduce_i64(e))
    }

    /// `θ^e` for an arbitrary-precision exponent.
    pub fn pow_big(&self, e: &BigInt) -> Complex64 {
        let r = e.mod_floor(&BigInt::from(self.n));
        self.pow_reduced(r.to_u64().expect("reduced exponent"))
    }

    pub fn value(&self) -> Complex64 {
        self.pow_reduced(1)
    }

    fn reduce_i64(&self, e: i64) -> u64 {
        (e as i128).rem_euclid(self.n as i128) as u64
    }

    fn reduce_big(&self, b: &BigUint) -> u64 {
        if self.n == 1 {
            return 0;
        }
        (b % self.n).to_u64().expect("residue below N")
    }
}

/// Running twist exponent `e_j` modulo `N`.
#[derive(Clone, Copy, Debug)]
struct TwistExponent {
    n: u64,
    e: u64,
}

impl TwistExponent {
    fn new(twist: &RootOfUnity) -> Self {
        TwistExponent { n: twist.n, e: 0 }
    }

    /// `e_j = e_{j-1} + (-1)^j b_j + 3 (-1)^{j+1}` with `b_j` given mod N.
    fn step(&mut self, j: usize, b_mod: u64) {
        let n = self.n;
        let three = 3 % n;
        if j % 2 == 1 {
            self.e = (self.e + n - b_mod + three) % n;
        } else {
            self.e = (self.e + b_mod + n - three) % n;
        }
    }
}

/// Exponent `e_j` of `θ_j = θ^{e_j}` for the quotients `b_1, ..., b_j`,
/// reduced modulo `N`.
pub fn theta_exponent(quotients: &[BigUint], twist: &RootOfUnity) -> u64 {
    let mut e = TwistExponent::new(twist);
    for (i, b) in quotients.iter().enumerate() {
        e.step(i + 1, twist.reduce_big(b));
    }
    e.e
}

/// How `f` moves under `x ↦ x + 1`, and the constant `F` closing the
/// reciprocity expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Periodicity {
    /// `f(x + 1) = θ f(x)` on all of `ℚ`. Then `F = f(0)`.
    Full { f0: Complex64 },
    /// `f(x + 1) = θ f(x)` only for `x ∉ [-1, 0]`, with `f(1) = plus`,
    /// `f(-1) = minus` and `f(0) = at_zero`. An expansion of odd length
    /// closes with `F = θ f(-1)`, one of even length with `F = θ^{-1} f(1)`.
    Weak { plus: Complex64, minus: Complex64, at_zero: Complex64 },
}

pub type PeriodFn = Arc<dyn Fn(&Rational) -> Complex64 + Send + Sync>;

/// A quantum modular form described by its weight, twist, period function
/// and periodicity. Immutable; `h` must be a pure function.
#[derive(Clone)]
pub struct QmfSpec {
    pub weight: Complex64,
    pub twist: RootOfUnity,
    pub h: PeriodFn,
    pub periodicity: Periodicity,
    tail: Arc<Once<f64>>,
}

impl fmt::Debug for QmfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QmfSpec")
            .field("weight", &self.weight)
            .field("twist", &self.twist)
            .field("periodicity", &self.periodicity)
            .finish_non_exhaustive()
    }
}

impl QmfSpec {
    pub fn new(
        weight: Complex64,
        twist: RootOfUnity,
        h: impl Fn(&Rational) -> Complex64 + Send + Sync + 'static,
        periodicity: Periodicity,
    ) -> Self {
        QmfSpec { weight, twist, h: Arc::new(h), periodicity, tail: Arc::new(Once::new()) }
    }

    /// Fixes the constant `C` with `|h(t)| ≤ C |t|^{-Re k}` on `0 < |t| ≤ 1`
    /// used by the stopping rule of [`ext_pos`]. Without it `C` is estimated
    /// by sampling `h`.
    pub fn with_tail_constant(mut self, c: f64) -> Self {
        let once = Once::new();
        once.call_once(|| c);
        self.tail = Arc::new(once);
        self
    }

    /// `f(1)`.
    pub fn base_plus(&self) -> Complex64 {
        match self.periodicity {
            Periodicity::Full { f0 } => self.twist.value() * f0,
            Periodicity::Weak { plus, .. } => plus,
        }
    }

    /// `f(-1)`.
    pub fn base_minus(&self) -> Complex64 {
        match self.periodicity {
            Periodicity::Full { f0 } => self.twist.pow(-1) * f0,
            Periodicity::Weak { minus, .. } => minus,
        }
    }

    /// `f(0)`.
    pub fn base_zero(&self) -> Complex64 {
        match self.periodicity {
            Periodicity::Full { f0 } => f0,
            Periodicity::Weak { at_zero, .. } => at_zero,
        }
    }

    #[inline]
    pub fn period(&self, x: &Rational) -> Complex64 {
        (self.h)(x)
    }

    pub fn tail_constant(&self) -> f64 {
        *self.tail.call_once(|| sample_tail_constant(self))
    }

    /// Trailing constant `F` for an expansion of length `r`.
    fn trailing(&self, r: usize) -> Complex64 {
        match self.periodicity {
            Periodicity::Full { f0 } => f0,
            Periodicity::Weak { plus, minus, .. } => {
                if r % 2 == 1 {
                    self.twist.value() * minus
                } else {
                    self.twist.pow(-1) * plus
                }
            }
        }
    }

    /// Constant term of `Ψ`, which sums over odd-length expansions.
    fn psi_constant(&self) -> Complex64 {
        self.trailing(1)
    }
}

/// `ln u` for an arbitrary-precision positive integer.
pub(crate) fn ln_big(u: &BigUint) -> f64 {
    let bits = u.bits();
    if bits <= 1000 {
        return u.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigUint = u >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * LN_2
}

/// `exp(-k L)`, i.e. `t^{-k}` for `t = e^L`.
#[inline]
fn pow_neg_k(ln_t: f64, k: Complex64) -> Complex64 {
    let mag = (-k.re * ln_t).exp();
    if k.im == 0.0 {
        return Complex64::new(mag, 0.0);
    }
    let (s, c) = (-k.im * ln_t).sin_cos();
    Complex64::new(mag * c, mag * s)
}

fn signed(p: &BigUint, negative: bool) -> BigInt {
    let sign = if p.is_zero() {
        Sign::NoSign
    } else if negative {
        Sign::Minus
    } else {
        Sign::Plus
    };
    BigInt::from_biguint(sign, p.clone())
}

/// `f(x)` for any rational `x`.
///
/// Values on `(0, 1)` come from the reciprocity expansion; the rest of `ℚ`
/// is reached by the periodicity rule of the spec. In the weak case the path
/// for `x < 0` is: shift by integers into `[-1, 0)` (picking up `θ^{-n}`),
/// then for `y ∈ (-1, 0)` apply the reciprocity relation once,
/// `f(y) = h(y) + θ^{-3} |y|^{-k} f(-1/y)`, which lands at `-1/y > 1` on
/// the positive side.
pub fn eval_f(spec: &QmfSpec, x: &Rational) -> Complex64 {
    if x.is_zero() {
        return spec.base_zero();
    }
    match spec.periodicity {
        Periodicity::Full { f0 } => {
            let n = x.floor();
            let y = x.fract();
            let shift = spec.twist.pow_big(&n);
            if y.is_zero() {
                shift * f0
            } else {
                shift * eval_unit(spec, &cf_expand(&y))
            }
        }
        Periodicity::Weak { plus, minus, .. } => {
            if x.is_positive() {
                // x = n + y with y ∈ (0, 1].
                let mut n = x.floor();
                let mut y = x.fract();
                if y.is_zero() {
                    n -= 1;
                    y = Rational::one();
                }
                let shift = spec.twist.pow_big(&n);
                if y == 1 {
                    shift * plus
                } else {
                    shift * eval_unit(spec, &cf_expand(&y))
                }
            } else {
                // x = y - n with y ∈ [-1, 0).
                let mut n = -x.floor();
                let mut y = x.fract();
                if y.is_zero() {
                    n -= 1;
                    y = Rational::from_integer(-1);
                } else {
                    y = &y - &Rational::one();
                    n -= 1;
                }
                let shift = spec.twist.pow_big(&-n);
                if y == -1 {
                    return shift * minus;
                }
                let ln_abs = (-y.to_f64()).ln();
                let inner = eval_f(spec, &y.neg_recip().expect("y ≠ 0"));
                let val = spec.period(&y) + spec.twist.pow(-3) * pow_neg_k(ln_abs, spec.weight) * inner;
                shift * val
            }
        }
    }
}

/// `f(x)` along a given expansion `[0; b_1, ..., b_r]` with `r ≥ 1`, which
/// need not be canonical.
pub fn eval_f_cf(spec: &QmfSpec, cf: &CfExpansion) -> Result<Complex64> {
    if !cf.b0.is_zero() || cf.is_empty() {
        return Err(domain("eval_f_cf expects [0; b_1, ..., b_r] with r ≥ 1"));
    }
    Ok(eval_unit(spec, cf))
}

fn eval_unit(spec: &QmfSpec, cf: &CfExpansion) -> Complex64 {
    let u = backward_denominators(cf).0;
    let r = cf.len();
    let k = spec.weight;
    let ln_u0 = ln_big(&u[0]);
    let mut acc = ComplexSum::new();
    let mut e = TwistExponent::new(&spec.twist);
    for j in 0..r {
        let arg = Rational::from_coprime(signed(&u[j + 1], j % 2 == 1), signed(&u[j], false));
        let weight = pow_neg_k(ln_big(&u[j]) - ln_u0, k);
        acc.add(spec.twist.pow_reduced(e.e) * weight * spec.period(&arg));
        e.step(j + 1, spec.twist.reduce_big(&cf.quotients[j]));
    }
    acc.add(spec.twist.pow_reduced(e.e) * pow_neg_k(-ln_u0, k) * spec.trailing(r));
    acc.value()
}

/// `Ψ(y) = Σ_{j=1}^r θ_j(y)^{-1} v_j^{-k} h((-1)^{j-1} v_{j-1}/v_j) + F`
/// over the odd-length expansion of `y ∈ (0, 1]`.
pub fn eval_psi(spec: &QmfSpec, y: &Rational) -> Result<Complex64> {
    let cf = cf_odd(y)?;
    let k = spec.weight;
    let mut acc = ComplexSum::new();
    let mut e = TwistExponent::new(&spec.twist);
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    for (i, b) in cf.quotients.iter().enumerate() {
        let j = i + 1;
        let next = b * &cur + &prev;
        prev = core::mem::replace(&mut cur, next);
        e.step(j, spec.twist.reduce_big(b));
        let arg = Rational::from_coprime(signed(&prev, j % 2 == 0), signed(&cur, false));
        let twist = spec.twist.pow_reduced(e.e).conj();
        acc.add(twist * pow_neg_k(ln_big(&cur), k) * spec.period(&arg));
    }
    acc.add(spec.psi_constant());
    Ok(acc.value())
}

/// Partial quotients `b_1, b_2, ...` of an irrational number in `(0, 1)`,
/// produced lazily.
pub struct IrrationalStream {
    seen: Vec<u64>,
    source: Source,
}

enum Source {
    Cycle { head: Vec<u64>, period: Vec<u64> },
    Finite,
    Generator(Box<dyn FnMut() -> u64 + Send>),
}

impl fmt::Debug for IrrationalStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IrrationalStream").field("seen", &self.seen).finish_non_exhaustive()
    }
}

impl IrrationalStream {
    /// `b_j = b` for all `j`; `b = 1` is the golden-ratio conjugate and
    /// `b = 2` is `√2 - 1`.
    pub fn constant(b: u64) -> Result<Self> {
        Self::periodic(Vec::new(), alloc::vec![b])
    }

    /// `head` followed by `period` repeated forever.
    pub fn periodic(head: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(domain("periodic stream needs a nonempty period"));
        }
        if head.iter().chain(&period).any(|&b| b == 0) {
            return Err(domain("partial quotients must be positive"));
        }
        Ok(IrrationalStream { seen: Vec::new(), source: Source::Cycle { head, period } })
    }

    /// A stream known only up to a finite depth; deeper requests yield
    /// `None`.
    pub fn from_prefix(prefix: Vec<u64>) -> Result<Self> {
        if prefix.contains(&0) {
            return Err(domain("partial quotients must be positive"));
        }
        Ok(IrrationalStream { seen: prefix, source: Source::Finite })
    }

    /// Quotients drawn from a generator, which must only emit values `≥ 1`.
    pub fn from_fn(f: impl FnMut() -> u64 + Send + 'static) -> Self {
        IrrationalStream { seen: Vec::new(), source: Source::Generator(Box::new(f)) }
    }

    /// `b_j` for `j ≥ 1`.
    pub fn quotient(&mut self, j: usize) -> Option<u64> {
        assert!(j >= 1, "quotients are indexed from 1");
        while self.seen.len() < j {
            let b = match &mut self.source {
                Source::Finite => return None,
                Source::Cycle { head, period } => {
                    let i = self.seen.len();
                    if i < head.len() {
                        head[i]
                    } else {
                        period[(i - head.len()) % period.len()]
                    }
                }
                Source::Generator(g) => {
                    let b = g();
                    assert!(b >= 1, "stream emitted a zero partial quotient");
                    b
                }
            };
            self.seen.push(b);
        }
        Some(self.seen[j - 1])
    }

    /// The first `len` quotients, or `None` if the stream is shorter.
    pub fn prefix(&mut self, len: usize) -> Option<&[u64]> {
        if len > 0 {
            self.quotient(len)?;
        }
        Some(&self.seen[..len])
    }

    /// Quotients produced so far.
    pub fn observed(&self) -> &[u64] {
        &self.seen
    }

    /// First index `j` among the observed quotients with
    /// `b_j > max(B, j (ln j)²)`, i.e. a witness that the stream leaves
    /// `𝔗(B)`.
    pub fn frak_t_violation(&self, bound: f64) -> Option<usize> {
        self.seen
            .iter()
            .enumerate()
            .find(|(i, &b)| b as f64 > crate::cf::frak_t_threshold(i + 1, bound))
            .map(|(i, _)| i + 1)
    }
}

/// Outcome of an extension computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtResult {
    pub value: Complex64,
    pub converged: bool,
    /// Number of partial quotients consumed.
    pub depth: usize,
}

/// `f†(x) = lim f(x_j)` over the convergents `x_j` of the stream, for
/// `Re k < 0`.
///
/// Stops once two consecutive convergent values are within `tol` twice in a
/// row; otherwise reports `converged = false` at `max_depth`.
pub fn ext_neg(spec: &QmfSpec, stream: &mut IrrationalStream, tol: f64, max_depth: usize) -> Result<ExtResult> {
    if !(spec.weight.re < 0.0) {
        return Err(domain("ext_neg requires Re(k) < 0"));
    }
    ext_neg_with(stream, tol, max_depth, |x| Ok(eval_f(spec, x)))
}

/// [`ext_neg`] with a caller-supplied evaluator at the convergents, for
/// forms with a faster direct formula.
pub fn ext_neg_with(
    stream: &mut IrrationalStream,
    tol: f64,
    max_depth: usize,
    eval: impl FnMut(&Rational) -> Result<Complex64>,
) -> Result<ExtResult> {
    ext_neg_bounded(stream, tol, max_depth, None, eval)
}

/// [`ext_neg_with`] that also gives up, with `converged = false`, before
/// evaluating at a convergent whose denominator exceeds `max_den`.
pub fn ext_neg_bounded(
    stream: &mut IrrationalStream,
    tol: f64,
    max_depth: usize,
    max_den: Option<u64>,
    mut eval: impl FnMut(&Rational) -> Result<Complex64>,
) -> Result<ExtResult> {
    let max_den = max_den.map(BigInt::from);
    // p_{j-1}/q_{j-1} and p_j/q_j, starting from 1/0 and 0/1.
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut last: Option<Complex64> = None;
    let mut calm = 0;
    let mut depth = 0;
    for j in 1..=max_depth {
        let Some(b) = stream.quotient(j) else { break };
        let b = BigInt::from(b);
        let p2 = &b * &p1 + &p0;
        let q2 = &b * &q1 + &q0;
        if max_den.as_ref().is_some_and(|m| q2 > *m) {
            break;
        }
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        depth = j;
        let val = eval(&Rational::from_coprime(p1.clone(), q1.clone()))?;
        if let Some(prev) = last {
            if (val - prev).norm() < tol {
                calm += 1;
                if calm >= 2 {
                    return Ok(ExtResult { value: val, converged: true, depth });
                }
            } else {
                calm = 0;
            }
        }
        last = Some(val);
    }
    Ok(ExtResult { value: last.unwrap_or_default(), converged: false, depth })
}

/// `f†(x)` for `Re k < 0` as the limit of the reciprocity expansion,
///
/// ```text
/// f†(x) = Σ_{j≥0} θ_j P_j^{-k} h((-1)^j T^j x),   P_j = x T(x) ⋯ T^{j-1}(x),
/// ```
///
/// for `x ∈ (0, 1)`. Each `h(T^j x)` is read off at convergents of `T^j x`
/// until two successive values agree to within `tol / |P_j^{-k}|`, so only
/// moderate denominators are needed where `h` is smooth. Summation stops
/// after two consecutive terms below `tol`. Streams that would need a
/// convergent beyond `max_den` report `converged = false`.
pub fn ext_neg_series(
    spec: &QmfSpec,
    stream: &mut IrrationalStream,
    tol: f64,
    max_depth: usize,
    max_den: Option<u64>,
) -> Result<ExtResult> {
    let k = spec.weight;
    if !(k.re < 0.0) {
        return Err(domain("ext_neg_series requires Re(k) < 0"));
    }
    let mut acc = ComplexSum::new();
    let mut e = TwistExponent::new(&spec.twist);
    let mut ln_p = 0.0;
    let mut calm = 0;
    let unfinished = |acc: &ComplexSum, depth| Ok(ExtResult { value: acc.value(), converged: false, depth });
    for j in 0..max_depth {
        let Some(b) = stream.quotient(j + 1) else { return unfinished(&acc, j) };
        let w = spec.twist.pow_reduced(e.e) * pow_neg_k(ln_p, k);
        let Some(hv) = h_at_tail(spec, stream, j, tol / w.norm().max(f64::MIN_POSITIVE), max_den) else {
            return unfinished(&acc, j);
        };
        let term = w * hv;
        acc.add(term);
        if term.norm() < tol {
            calm += 1;
            if calm >= 2 {
                return Ok(ExtResult { value: acc.value(), converged: true, depth: stream.observed().len() });
            }
        } else {
            calm = 0;
        }
        e.step(j + 1, spec.twist.reduce_big(&BigUint::from(b)));
        ln_p += tail_value(stream, j).ln();
    }
    unfinished(&acc, max_depth)
}

/// `T^j x = [0; b_{j+1}, b_{j+2}, ...]` in floating point.
fn tail_value(stream: &mut IrrationalStream, j: usize) -> f64 {
    let mut quotients = Vec::new();
    for i in j + 1..=j + 40 {
        match stream.quotient(i) {
            Some(b) => quotients.push(b),
            None => break,
        }
    }
    quotients.iter().rev().fold(0.0, |t, &b| 1.0 / (b as f64 + t))
}

/// `h((-1)^j T^j x)` to within `tol`, from the convergents of `T^j x`.
fn h_at_tail(
    spec: &QmfSpec,
    stream: &mut IrrationalStream,
    j: usize,
    tol: f64,
    max_den: Option<u64>,
) -> Option<Complex64> {
    let negative = j % 2 == 1;
    let (mut p0, mut q0) = (BigUint::one(), BigUint::zero());
    let (mut p1, mut q1) = (BigUint::zero(), BigUint::one());
    let mut prev: Option<Complex64> = None;
    for m in 1..=64 {
        let b = BigUint::from(stream.quotient(j + m)?);
        let p2 = &b * &p1 + &p0;
        let q2 = &b * &q1 + &q0;
        if max_den.is_some_and(|d| q2 > BigUint::from(d)) {
            return None;
        }
        p0 = core::mem::replace(&mut p1, p2);
        q0 = core::mem::replace(&mut q1, q2);
        let val = spec.period(&Rational::from_coprime(signed(&p1, negative), signed(&q1, false)));
        if !(val.re.is_finite() && val.im.is_finite()) {
            return None;
        }
        if let Some(pv) = prev {
            if (val - pv).norm() < tol {
                return Some(val);
            }
        }
        prev = Some(val);
    }
    None
}

/// `f★(x)` for `Re k > 0`, as the partial sums of
///
/// ```text
/// Σ_{j≥1} θ_j^{-1} v_j^{-k} h((-1)^{j-1} v_{j-1}/v_j) + F.
/// ```
///
/// With `|h(t)| ≤ C |t|^{-Re k}` each term is at most `C v_{j-1}^{-Re k}`,
/// and `v_{j+2} ≥ 2 v_j` bounds the tail after `J` terms by
/// `2 C v_J^{-Re k} / (1 - 2^{-Re k})`. Summation stops once that is below
/// `tol`.
pub fn ext_pos(spec: &QmfSpec, stream: &mut IrrationalStream, tol: f64, max_depth: usize) -> Result<ExtResult> {
    let kappa = spec.weight.re;
    if !(kappa > 0.0) {
        return Err(domain("ext_pos requires Re(k) > 0"));
    }
    let scale = 2.0 * spec.tail_constant() / (1.0 - (-kappa * LN_2).exp());
    let mut value = Complex64::default();
    let mut depth = 0;
    let mut converged = false;
    psi_series(spec, stream, max_depth, |j, s, ln_v| {
        value = s;
        depth = j;
        converged = scale * (-kappa * ln_v).exp() < tol;
        !converged
    })?;
    if depth == 0 {
        value = spec.psi_constant();
    }
    Ok(ExtResult { value, converged, depth })
}

/// Partial sums `S_1, ..., S_depth` of the series behind [`ext_pos`],
/// including the constant term. Shorter if the stream ends.
pub fn ext_pos_partial_sums(spec: &QmfSpec, stream: &mut IrrationalStream, depth: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(depth);
    psi_series(spec, stream, depth, |_, s, _| {
        out.push(s);
        true
    })?;
    Ok(out)
}

/// Drives the `Ψ` series along a stream; `visit(j, S_j, ln v_j)` returns
/// whether to continue.
fn psi_series(
    spec: &QmfSpec,
    stream: &mut IrrationalStream,
    max_depth: usize,
    mut visit: impl FnMut(usize, Complex64, f64) -> bool,
) -> Result<()> {
    let k = spec.weight;
    let mut acc = ComplexSum::new();
    acc.add(spec.psi_constant());
    let mut e = TwistExponent::new(&spec.twist);
    let mut prev = BigUint::zero();
    let mut cur = BigUint::one();
    for j in 1..=max_depth {
        let Some(b) = stream.quotient(j) else { break };
        let next = &cur * b + &prev;
        prev = core::mem::replace(&mut cur, next);
        e.step(j, b % spec.twist.n);
        let arg = Rational::from_coprime(signed(&prev, j % 2 == 0), signed(&cur, false));
        let ln_v = ln_big(&cur);
        let twist = spec.twist.pow_reduced(e.e).conj();
        acc.add(twist * pow_neg_k(ln_v, k) * spec.period(&arg));
        if !visit(j, acc.value(), ln_v) {
            break;
        }
    }
    Ok(())
}

/// Estimates `C = sup |h(t)| |t|^{Re k}` over `0 < |t| ≤ 1` from the reduced
/// fractions with denominator at most 16 and the points `1/n` for
/// `n ≤ 128`, with a 25% margin.
fn sample_tail_constant(spec: &QmfSpec) -> f64 {
    let kappa = spec.weight.re;
    let mut best: f64 = 0.0;
    let mut probe = |m: i64, n: i64| {
        for s in [1, -1] {
            let t = Rational::new(s * m, n).expect("nonzero denominator");
            let v = spec.period(&t).norm() * ((m as f64) / (n as f64)).powf(kappa);
            if v.is_finite() {
                best = best.max(v);
            }
        }
    };
    for n in 1..=16i64 {
        for m in 1..=n {
            if m.gcd(&n) == 1 {
                probe(m, n);
            }
        }
    }
    for n in [24, 32, 48, 64, 96, 128] {
        probe(1, n);
    }
    1.25 * best
}

/// `w(x) = 1(j ≤ r(x)) (Π_{i<j} T^i(x))^λ g(T^j(x))` for `x ∈ [0, 1)`.
///
/// The product telescopes to `u_j/u_0`.
pub fn w_eval(j: usize, lambda: f64, g: impl Fn(&Rational) -> Complex64, x: &Rational) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(domain("w_eval requires λ > 0"));
    }
    if x.is_negative() || *x >= 1 {
        return Err(domain(format!("w_eval requires 0 ≤ x < 1, got {x}")));
    }
    if x.is_zero() {
        return Ok(if j == 0 { g(x) } else { Complex64::default() });
    }
    let u = backward_denominators(&cf_expand(x)).0;
    let r = u.len() - 1;
    if j > r {
        return Ok(Complex64::default());
    }
    let iterate = if j < r {
        Rational::from_coprime(u[j + 1].clone().into(), u[j].clone().into())
    } else {
        Rational::zero()
    };
    let prod = (lambda * (ln_big(&u[j]) - ln_big(&u[0]))).exp();
    Ok(g(&iterate) * prod)
}

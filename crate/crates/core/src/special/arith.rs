//! Divisor sums and Ramanujan's τ.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::Zero;

/// `σ_k(n) = Σ_{d | n} d^k`, exactly. `σ_k(0)` is defined as 0.
pub fn sigma_div(k: u32, n: u64) -> BigUint {
    let mut total = BigUint::zero();
    if n == 0 {
        return total;
    }
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            total += BigUint::from(d).pow(k);
            let e = n / d;
            if e != d {
                total += BigUint::from(e).pow(k);
            }
        }
        d += 1;
    }
    total
}

/// `τ(0), τ(1), …, τ(n)` with `τ(0) = 0`, from
/// `Δ = q (Π (1 - q^m)^3)^8` and Jacobi's identity
/// `Π (1 - q^m)^3 = Σ_{m≥0} (-1)^m (2m+1) q^{m(m+1)/2}`.
///
/// `|τ(n)| < n^{11/2} d(n)` keeps every intermediate well inside `i128`
/// for `n ≤ 10^6`.
pub fn ramanujan_tau(n: usize) -> Vec<i128> {
    let mut out = vec![0i128; n + 1];
    if n == 0 {
        return out;
    }
    let len = n; // coefficients of q^0 .. q^{n-1}
    let mut jacobi: Vec<(usize, i128)> = Vec::new();
    let mut m = 0usize;
    while m * (m + 1) / 2 < len {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        jacobi.push((m * (m + 1) / 2, sign * (2 * m + 1) as i128));
        m += 1;
    }
    let mut acc = vec![0i128; len];
    for &(e, c) in &jacobi {
        acc[e] = c;
    }
    let mut next = vec![0i128; len];
    for _ in 1..8 {
        next.iter_mut().for_each(|v| *v = 0);
        for &(e, c) in &jacobi {
            for (dst, src) in next[e..].iter_mut().zip(&acc[..len - e]) {
                *dst += c * *src;
            }
        }
        core::mem::swap(&mut acc, &mut next);
    }
    out[1..].copy_from_slice(&acc);
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_initial_values() {
        let t = ramanujan_tau(12);
        assert_eq!(
            &t[1..],
            &[1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944]
        );
    }

    #[test]
    fn tau_congruence_691() {
        let t = ramanujan_tau(200);
        for n in 1..=200u64 {
            let s = sigma_div(11, n) % BigUint::from(691u32);
            let s = i128::try_from(u64::try_from(s).unwrap()).unwrap();
            assert_eq!((t[n as usize] - s).rem_euclid(691), 0, "n = {n}");
        }
    }

    #[test]
    fn tau_is_multiplicative() {
        let t = ramanujan_tau(400);
        for (a, b) in [(2, 3), (4, 9), (5, 7), (11, 13), (16, 25)] {
            assert_eq!(t[a * b], t[a] * t[b]);
        }
        // τ(p^2) = τ(p)^2 - p^11
        assert_eq!(t[4], t[2] * t[2] - 2i128.pow(11));
    }

    #[test]
    fn sigma_small() {
        assert_eq!(sigma_div(1, 12), BigUint::from(28u32));
        assert_eq!(sigma_div(0, 12), BigUint::from(6u32));
        assert_eq!(sigma_div(5, 1), BigUint::from(1u32));
        assert_eq!(sigma_div(3, 0), BigUint::zero());
    }
}

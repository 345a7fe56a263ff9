//! Exact integer combinatorics shared by the permutation and bound modules.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n!` for small `n`; panics on overflow (n > 20).
pub fn factorial_u64(n: usize) -> u64 {
    assert!(n <= 20, "factorial_u64 overflows for n = {n}");
    (2..=n as u64).product()
}

/// Factorials `0!..=n!` in one pass.
pub fn factorial_table(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = BigUint::one();
    out.push(acc.clone());
    for k in 1..=n as u64 {
        acc *= k;
        out.push(acc.clone());
    }
    out
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k as u64 {
        acc *= n as u64 - i;
        acc /= i + 1;
    }
    acc
}

/// Derangement numbers `D_0..=D_n` via `D_k = (k-1)(D_{k-1} + D_{k-2})`.
pub fn derangements(n: usize) -> Vec<BigUint> {
    let mut d = vec![BigUint::one()];
    if n >= 1 {
        d.push(BigUint::zero());
    }
    for k in 2..=n {
        let next = (&d[k - 1] + &d[k - 2]) * (k as u64 - 1);
        d.push(next);
    }
    d
}

pub fn derangement(n: usize) -> BigUint {
    derangements(n).pop().expect("table is nonempty")
}

/// `n!! = n (n-2) (n-4) ...`, with `0!! = (-1)!! = 1`.
pub fn double_factorial(n: usize) -> BigUint {
    (1..=n as u64)
        .rev()
        .step_by(2)
        .fold(BigUint::one(), |acc, k| acc * k)
}

/// log2 of a positive big integer, accurate to f64 precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.log2() + shift as f64
}

pub fn log2_rational(x: &BigRational) -> f64 {
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    log2_biguint(num) - log2_biguint(den)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let sign = if x.numer().sign() == num_bigint::Sign::Minus { -1.0 } else { 1.0 };
    sign * log2_rational(x).exp2()
}

/// Compares `(a/b)^(1/p)` against `(c/d)^(1/q)` exactly.
///
/// All arguments are nonnegative integers with `b, d, p, q > 0`.
pub fn cmp_rational_roots(a: &BigUint, b: &BigUint, p: u32, c: &BigUint, d: &BigUint, q: u32) -> std::cmp::Ordering {
    // (a/b)^q vs (c/d)^p  <=>  a^q d^p vs c^p b^q
    let lhs = a.pow(q) * d.pow(p);
    let rhs = c.pow(p) * b.pow(q);
    lhs.cmp(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(factorial_u64(8), 40320);
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        let d: Vec<u64> = derangements(6).iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 0, 1, 2, 9, 44, 265]);
        assert_eq!(double_factorial(7), BigUint::from(105u32));
        assert_eq!(double_factorial(0), BigUint::one());
    }

    #[test]
    fn log2_large() {
        let x = BigUint::one() << 5000u32;
        assert!((log2_biguint(&x) - 5000.0).abs() < 1e-9);
        let f = factorial(1024);
        let direct: f64 = (1..=1024).map(|k| (k as f64).log2()).sum();
        assert!((log2_biguint(&f) - direct).abs() < 1e-6);
    }

    #[test]
    fn root_comparison() {
        use std::cmp::Ordering;
        let b = |x: u32| BigUint::from(x);
        // 4^(1/2) == 2^(1/1)
        assert_eq!(cmp_rational_roots(&b(4), &b(1), 2, &b(2), &b(1), 1), Ordering::Equal);
        // (1/20)^(1/2) < (1/60)^(1/3)
        assert_eq!(cmp_rational_roots(&b(1), &b(20), 2, &b(1), &b(60), 3), Ordering::Less);
    }
}

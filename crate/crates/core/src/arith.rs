//! Small number-theoretic helpers shared across modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{LatticeError, Result};

const TRIAL_LIMIT: u64 = 1 << 16;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic for all 64-bit inputs
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod_u64(r, b, m);
        }
        b = mul_mod_u64(b, b, m);
        e >>= 1;
    }
    r
}

/// Strong probable-prime test; deterministic below 2⁶⁴.
pub fn is_prime(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn require_prime(p: &BigInt) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(LatticeError::invalid(format!("{p} is not prime")))
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Prime divisors of `|n|`, ascending. Falls back to Pollard rho past trial division.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut p = 2u64;
    while p < TRIAL_LIMIT && BigInt::from(p * p) <= n {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            out.push(bp.clone());
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m.is_one() {
                continue;
            }
            if is_prime(&m) {
                out.push(m);
                continue;
            }
            let f = pollard_rho(&m);
            let mut rest = m.clone();
            while rest.is_multiple_of(&f) {
                rest /= &f;
            }
            stack.push(f);
            stack.push(rest);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn pollard_rho(n: &BigInt) -> BigInt {
    let one = BigInt::one();
    for c in 1u32.. {
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (BigInt::from(2), BigInt::from(2), one.clone());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
    }
    unreachable!()
}

/// Representative of `r` modulo `modulus` in `[0, modulus)`.
pub fn rational_mod(r: &BigRational, modulus: &BigInt) -> BigRational {
    let m = BigRational::from_integer(modulus.clone());
    let q = (r / &m).floor();
    r - q * m
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: &BigInt) -> i8 {
    let r = a.mod_floor(p);
    if r.is_zero() {
        return 0;
    }
    let e = (p - BigInt::one()) >> 1;
    if r.modpow(&e, p).is_one() {
        1
    } else {
        -1
    }
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        assert!(is_prime(&BigInt::from(18446744073709551557u64)));
    }

    #[test]
    fn factor_helpers() {
        assert_eq!(prime_divisors(&big(-360)), vec![big(2), big(3), big(5)]);
        assert_eq!(prime_divisors(&big(1)), Vec::<BigInt>::new());
        let semi = BigInt::from(1_000_003u64) * BigInt::from(1_000_033u64);
        assert_eq!(
            prime_divisors(&semi),
            vec![BigInt::from(1_000_003u64), BigInt::from(1_000_033u64)]
        );
        assert_eq!(valuation(&big(-72), &big(2)), 3);
        assert_eq!(valuation(&big(27), &big(3)), 3);
    }

    #[test]
    fn rational_reduction() {
        assert_eq!(rational_mod(&rat(-1, 2), &big(2)), rat(3, 2));
        assert_eq!(rational_mod(&rat(-1, 6), &big(2)), rat(11, 6));
        assert_eq!(rational_mod(&rat(5, 2), &big(1)), rat(1, 2));
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(&big(-1), &big(3)), -1);
        assert_eq!(legendre(&big(-1), &big(5)), 1);
        assert_eq!(legendre(&big(10), &big(5)), 0);
    }
}

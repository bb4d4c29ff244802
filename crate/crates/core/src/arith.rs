//! Rational integer helpers: factorization, primality, square roots.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

#[inline]
pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

#[inline]
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

/// Non-negative remainder.
#[inline]
pub fn modp(a: &Int, m: &Int) -> Int {
    a.mod_floor(m)
}

pub fn mod_inv(a: &Int, m: &Int) -> Option<Int> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

pub fn isqrt(n: &Int) -> Int {
    assert!(!n.is_negative());
    n.sqrt()
}

pub fn exact_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

pub fn rat_sqrt(q: &Rat) -> Option<Rat> {
    Some(Rat::new(exact_sqrt(q.numer())?, exact_sqrt(q.denom())?))
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_rec(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

/// Prime factorization of a positive 64-bit integer, sorted by prime.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut ps = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n.is_multiple_of(p) {
            ps.push(p);
            n /= p;
        }
    }
    factor_rec(n, &mut ps);
    ps.sort_unstable();
    let mut res: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match res.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => res.push((p, 1)),
        }
    }
    res
}

fn is_probable_prime_big(n: &Int) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = Int::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let mut x = Int::from(a).modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Factor a nonzero integer (sign dropped). Integers with a cofactor above
/// 2^64 that is neither prime nor split by trial division up to 10^6 are
/// rejected as a resource error.
pub fn factor(n: &Int) -> Result<Vec<(Int, u32)>> {
    if n.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut n = n.abs();
    if let Some(v) = n.to_u64() {
        return Ok(factor_u64(v)
            .into_iter()
            .map(|(p, e)| (Int::from(p), e))
            .collect());
    }
    let mut res: Vec<(Int, u32)> = Vec::new();
    let mut p = 2u64;
    while p < 1_000_000 {
        let pb = Int::from(p);
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            res.push((pb, e));
        }
        if n.to_u64().is_some() {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if let Some(v) = n.to_u64() {
        if v > 1 {
            for (q, e) in factor_u64(v) {
                let qb = Int::from(q);
                match res.iter_mut().find(|(r, _)| *r == qb) {
                    Some(slot) => slot.1 += e,
                    None => res.push((qb, e)),
                }
            }
        }
    } else if is_probable_prime_big(&n) {
        res.push((n, 1));
    } else {
        return Err(Error::Resource("integer too large to factor".into()));
    }
    res.sort();
    Ok(res)
}

pub fn squarefree_part(n: &Int) -> Result<Int> {
    let mut r = if n.sign() == Sign::Minus { -Int::one() } else { Int::one() };
    for (p, e) in factor(n)? {
        if e % 2 == 1 {
            r *= p;
        }
    }
    Ok(r)
}

/// Fundamental discriminant of `Q(sqrt(n))` for a nonsquare `n`.
pub fn fundamental_discriminant(n: &Int) -> Result<Int> {
    let d = squarefree_part(n)?;
    if modp(&d, &int(4)) == int(1) {
        Ok(d)
    } else {
        Ok(d * 4)
    }
}

pub fn lcm(a: &Int, b: &Int) -> Int {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_matches_trial_division() {
        for n in 1u64..3000 {
            let f = factor_u64(n);
            let prod: u64 = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(prod, n);
            for (p, _) in f {
                assert!((2..p).all(|d| p % d != 0));
            }
        }
    }

    #[test]
    fn factor_semiprime() {
        let n = 1_000_003u64 * 998_244_353u64;
        assert_eq!(factor_u64(n), vec![(1_000_003, 1), (998_244_353, 1)]);
        let big = Int::from(1_000_000_007u64) * Int::from(1_000_000_009u64) * 1024;
        let f = factor(&big).unwrap();
        assert_eq!(f[0], (int(2), 10));
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn fund_disc() {
        assert_eq!(fundamental_discriminant(&int(809)).unwrap(), int(809));
        assert_eq!(fundamental_discriminant(&int(796)).unwrap(), int(796));
        assert_eq!(fundamental_discriminant(&int(20)).unwrap(), int(5));
        assert_eq!(fundamental_discriminant(&int(-20)).unwrap(), int(-20));
    }
}

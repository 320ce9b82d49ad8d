//! Elementary number theory on `BigInt`: factoring, primality, square roots
//! modulo composites, CRT and the Kronecker symbol.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// `(g, x, y)` with `a·x + b·y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m > 0`, if it exists, in `[0, m)`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let (g, x, _) = ext_gcd(&a.mod_floor(m), m);
    g.is_one().then(|| x.mod_floor(m))
}

/// Largest `s` with `s^2 <= n` (n >= 0).
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    !n.is_negative() && {
        let s = isqrt(n);
        &s * &s == *n
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero());
    let mut n = n.abs();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

pub fn mod_pow(b: &BigInt, e: &BigInt, m: &BigInt) -> BigInt {
    b.mod_floor(m).modpow(e, m)
}

/// Miller–Rabin with the first twelve prime bases (deterministic below
/// 3.3·10^24, overwhelmingly reliable above).
pub fn is_prime(n: &BigInt) -> bool {
    let n = n.abs();
    if n < big(2) {
        return false;
    }
    const SMALL: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        let p = BigInt::from(p);
        if n == p {
            return true;
        }
        if (&n % &p).is_zero() {
            return false;
        }
    }
    let n1 = &n - BigInt::one();
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for a in SMALL {
        let mut x = BigInt::from(a).modpow(&d, &n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % &n;
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return big(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let (mut x, mut y, mut d) = (big(2), big(2), BigInt::one());
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorisation of `|n|` as `prime -> exponent` (empty for ±1; `n`
/// must be nonzero).
pub fn factor(n: &BigInt) -> BTreeMap<BigInt, u32> {
    assert!(!n.is_zero(), "factor(0)");
    let mut out = BTreeMap::new();
    let mut n = n.abs();
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = BigInt::from(p);
        while (&n % &p).is_zero() {
            n /= &p;
            *out.entry(p.clone()).or_insert(0) += 1;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    factor(n).into_keys().collect()
}

/// All positive divisors of `|n|`, sorted (empty for zero).
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    if n.is_zero() {
        return Vec::new();
    }
    let mut ds = vec![BigInt::one()];
    for (p, e) in factor(n) {
        let mut next = Vec::with_capacity(ds.len() * (e as usize + 1));
        for d in &ds {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        ds = next;
    }
    ds.sort();
    ds
}

/// Writes `n = s·k²` with `s` squarefree (sign kept on `s`); `n != 0`.
pub fn squarefree_decomposition(n: &BigInt) -> (BigInt, BigInt) {
    let mut s = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut k = BigInt::one();
    for (p, e) in factor(n) {
        if e % 2 == 1 {
            s *= &p;
        }
        k *= p.pow(e / 2);
    }
    (s, k)
}

/// Kronecker symbol `(a/n)`.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1;
    let mut a = a.clone();
    let mut n = n.clone();
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            result = -result;
        }
    }
    let v = n.trailing_zeros().unwrap_or(0);
    if v > 0 {
        if a.is_even() {
            return 0;
        }
        n >>= v;
        let r = a.mod_floor(&big(8)).to_u32().unwrap();
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a/n) for odd positive n.
    a = a.mod_floor(&n);
    while !a.is_zero() {
        let v = a.trailing_zeros().unwrap_or(0);
        a >>= v;
        let r = n.mod_floor(&big(8)).to_u32().unwrap();
        if v % 2 == 1 && (r == 3 || r == 5) {
            result = -result;
        }
        if a.mod_floor(&big(4)) == big(3) && n.mod_floor(&big(4)) == big(3) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a = a.mod_floor(&n);
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

/// A square root of `a` modulo an odd prime `p` with `(a/p) = 1`.
fn tonelli_shanks(a: &BigInt, p: &BigInt) -> BigInt {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return a;
    }
    let p1 = p - BigInt::one();
    let s = p1.trailing_zeros().unwrap_or(0);
    let q = &p1 >> s;
    let mut z = big(2);
    while kronecker(&z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1) >> 1), p);
    while !t.is_one() {
        let mut i = 0;
        let mut tt = t.clone();
        while !tt.is_one() {
            tt = (&tt * &tt) % p;
            i += 1;
        }
        let b = c.modpow(&(BigInt::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    r
}

/// All `x mod p^e` with `x² ≡ a (mod p^e)`.
fn sqrt_mod_prime_power(a: &BigInt, p: &BigInt, e: u32) -> Vec<BigInt> {
    let pe = p.pow(e);
    let a = a.mod_floor(&pe);
    let two = big(2);
    if p != &two && !(&a % p).is_zero() {
        if kronecker(&a, p) != 1 {
            return Vec::new();
        }
        // Hensel lift of the two simple roots.
        let mut r = tonelli_shanks(&a, p);
        let mut pk = p.clone();
        for _ in 1..e {
            pk *= p;
            let fx = (&r * &r - &a).mod_floor(&pk);
            let inv = mod_inverse(&(&two * &r), &pk).expect("unit derivative");
            r = (&r - fx * inv).mod_floor(&pk);
        }
        let mut v = vec![r.clone(), (-&r).mod_floor(&pe)];
        v.sort();
        v.dedup();
        return v;
    }
    // Digit-by-digit lifting: complete because every root mod p^(k+1)
    // reduces to a root mod p^k.
    let mut roots: Vec<BigInt> = (0..p.to_u64().expect("small prime"))
        .map(BigInt::from)
        .filter(|x| ((x * x) - &a).mod_floor(p).is_zero())
        .collect();
    let mut pk = p.clone();
    for _ in 1..e {
        let next = &pk * p;
        let mut lifted = Vec::new();
        for r in &roots {
            let mut j = BigInt::zero();
            while &j < p {
                let x = r + &j * &pk;
                if (&x * &x - &a).mod_floor(&next).is_zero() {
                    lifted.push(x);
                }
                j += 1;
            }
        }
        roots = lifted;
        pk = next;
    }
    roots.sort();
    roots
}

/// Combine `x ≡ r1 (mod m1)` and `x ≡ r2 (mod m2)` for coprime moduli.
pub fn crt_pair(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> BigInt {
    let inv = mod_inverse(m1, m2).expect("coprime moduli");
    let m = m1 * m2;
    (r1 + m1 * ((r2 - r1) * inv).mod_floor(m2)).mod_floor(&m)
}

/// All square roots of `a` modulo `m >= 1`, sorted in `[0, m)`.
pub fn sqrt_mod_all(a: &BigInt, m: &BigInt) -> Vec<BigInt> {
    assert!(m.is_positive());
    if m.is_one() {
        return vec![BigInt::zero()];
    }
    let mut acc = vec![BigInt::zero()];
    let mut modulus = BigInt::one();
    for (p, e) in factor(m) {
        let pe = p.pow(e);
        let local = sqrt_mod_prime_power(a, &p, e);
        if local.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for r1 in &acc {
            for r2 in &local {
                next.push(crt_pair(r1, &modulus, r2, &pe));
            }
        }
        acc = next;
        modulus *= pe;
    }
    acc.sort();
    acc
}

/// Sign-normalised "part of `a` coprime to all primes in `primes`", positive.
pub fn strip_primes(a: &BigInt, primes: &[BigInt]) -> BigInt {
    let mut a = a.abs();
    if a.is_zero() {
        return a;
    }
    for p in primes {
        while (&a % p).is_zero() {
            a /= p;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_divisors() {
        let f = factor(&big(-360));
        assert_eq!(f.get(&big(2)), Some(&3));
        assert_eq!(f.get(&big(3)), Some(&2));
        assert_eq!(f.get(&big(5)), Some(&1));
        let n = big(1_000_003) * big(999_983);
        assert_eq!(prime_divisors(&n), vec![big(999_983), big(1_000_003)]);
        assert_eq!(divisors(&big(12)).len(), 6);
    }

    #[test]
    fn primality() {
        let primes: Vec<i64> = (0..60).filter(|&n| is_prime(&big(n))).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(&big(2_147_483_647)));
        assert!(!is_prime(&big(3_215_031_751)));
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3i64, 5, 7, 11, 13, 101] {
            for a in -20i64..20 {
                let e = mod_pow(&big(a), &big((p - 1) / 2), &big(p));
                let expected = if e.is_zero() {
                    0
                } else if e.is_one() {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(&big(a), &big(p)), expected, "({a}/{p})");
            }
        }
        // (D/2) for D ≡ 1 mod 8 is 1, ≡ 5 mod 8 is -1.
        assert_eq!(kronecker(&big(17), &big(2)), 1);
        assert_eq!(kronecker(&big(5), &big(2)), -1);
        assert_eq!(kronecker(&big(-15), &big(2)), 1);
    }

    #[test]
    fn square_roots_modulo_composites() {
        for m in 1i64..200 {
            for a in [-20i64, -15, -4, 1, 5, 12, 101] {
                let brute: Vec<BigInt> = (0..m)
                    .filter(|x| (x * x - a).rem_euclid(m) == 0)
                    .map(big)
                    .collect();
                assert_eq!(sqrt_mod_all(&big(a), &big(m)), brute, "a={a}, m={m}");
            }
        }
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_decomposition(&big(-60)), (big(-15), big(2)));
        assert_eq!(squarefree_decomposition(&big(20)), (big(5), big(2)));
    }
}

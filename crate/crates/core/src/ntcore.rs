//! Scalar number theory on arbitrary-precision naturals.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Arbitrary-precision non-negative integer.
pub type Natural = BigUint;

/// `value = delta * 2^t` with `delta` odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddFactorDecomp {
    pub delta: Natural,
    pub t: u64,
}

impl OddFactorDecomp {
    pub fn recompose(&self) -> Natural {
        &self.delta << self.t
    }
}

/// Lowest 64 bits of `n`.
pub(crate) fn low_u64(n: &BigUint) -> u64 {
    n.iter_u64_digits().next().unwrap_or(0)
}

fn check_odd_modulus(n: &BigUint) -> Result<()> {
    if n.is_even() || *n < BigUint::from(3u8) {
        return Err(Error::InvalidModulus(n.clone()));
    }
    Ok(())
}

/// Jacobi symbol `(a / n)` for an odd modulus `n >= 3`; `a` may be negative.
pub fn jacobi(a: &BigInt, n: &BigUint) -> Result<i8> {
    check_odd_modulus(n)?;
    let n_signed = BigInt::from_biguint(Sign::Plus, n.clone());
    let reduced = a.mod_floor(&n_signed);
    Ok(jacobi_reduced(reduced.magnitude().clone(), n.clone()))
}

/// Jacobi symbol for a non-negative numerator.
pub fn jacobi_nat(a: &BigUint, n: &BigUint) -> Result<i8> {
    check_odd_modulus(n)?;
    Ok(jacobi_reduced(a % n, n.clone()))
}

/// Binary Jacobi algorithm; requires `n` odd and `a < n`.
fn jacobi_reduced(mut a: BigUint, mut n: BigUint) -> i8 {
    let mut sign = 1i8;
    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        if twos % 2 == 1 {
            let r = low_u64(&n) & 7;
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        a >>= twos;
        if low_u64(&a) & 3 == 3 && low_u64(&n) & 3 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// `base^exp mod n`.
pub fn modexp(base: &BigUint, exp: &BigUint, n: &BigUint) -> Result<Natural> {
    if *n < BigUint::from(2u8) {
        return Err(Error::ModulusTooSmall(n.clone()));
    }
    Ok(base.modpow(exp, n))
}

/// Floor square root and whether it is exact.
pub fn isqrt(n: &BigUint) -> (Natural, bool) {
    let mut s = n.sqrt();
    // The library root is exact already; the loops pin the floor by
    // multiplication regardless.
    while &s * &s > *n {
        s -= 1u8;
    }
    loop {
        let next = &s + 1u8;
        if &next * &next <= *n {
            s = next;
        } else {
            break;
        }
    }
    let exact = &s * &s == *n;
    (s, exact)
}

/// Detects `n = s^2` by probing both `floor(sqrt(n))` and its successor.
pub fn perfect_square_root(n: &BigUint) -> Option<Natural> {
    let (s, exact) = isqrt(n);
    if exact {
        return Some(s);
    }
    let s1 = s + 1u8;
    if &s1 * &s1 == *n {
        Some(s1)
    } else {
        None
    }
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for 64-bit values: small-prime trial division
/// followed by Miller-Rabin over the first twelve prime bases, which is
/// exact for every `n < 3.3 * 10^24`.
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'bases: for &a in &BASES {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn is_prime_trial(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n.is_even() {
        return false;
    }
    let limit = n.sqrt();
    let mut d = BigUint::from(3u8);
    while d <= limit {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2u8;
    }
    true
}

/// Smallest prime strictly greater than `p`.
pub fn next_prime(p: &BigUint) -> Natural {
    if let Some(small) = p.to_u64() {
        if let Some(next) = next_prime_u64(small) {
            return BigUint::from(next);
        }
    }
    let mut c = p + 1u8;
    if c.is_even() {
        c += 1u8;
    }
    while !is_prime_trial(&c) {
        c += 2u8;
    }
    c
}

/// Smallest prime strictly greater than `p`, if it fits in 64 bits.
pub fn next_prime_u64(p: u64) -> Option<u64> {
    if p < 2 {
        return Some(2);
    }
    let mut c = p.checked_add(1)?;
    if c % 2 == 0 && c != 2 {
        c = c.checked_add(1)?;
    }
    while !is_prime_u64(c) {
        c = c.checked_add(2)?;
    }
    Some(c)
}

/// Splits `z` into its odd part and power of two.
pub fn lof_tpow(z: &BigUint) -> Result<OddFactorDecomp> {
    let t = z.trailing_zeros().ok_or(Error::ZeroDecomposition)?;
    Ok(OddFactorDecomp { delta: z >> t, t })
}

pub fn gcd(a: &BigUint, b: &BigUint) -> Natural {
    a.gcd(b)
}

/// Counts units of `Z_n` with Jacobi symbol -1 and +1, by exhaustive scan.
pub fn count_qnr(n: u64) -> Result<(u64, u64)> {
    let big_n = BigUint::from(n);
    check_odd_modulus(&big_n)?;
    if isqrt(&big_n).1 {
        return Err(Error::PerfectSquare(big_n));
    }
    let (mut qnr, mut qr) = (0, 0);
    for a in 1..n {
        match jacobi_reduced(BigUint::from(a), big_n.clone()) {
            -1 => qnr += 1,
            1 => qr += 1,
            _ => {}
        }
    }
    Ok((qnr, qr))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn j(a: i64, m: u64) -> i8 {
        jacobi(&BigInt::from(a), &n(m)).unwrap()
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(j(2, 341), -1);
        assert_eq!(j(15, 2047), 1);
        assert_eq!(j(17, 443372888629441), 0);
        for m in [3u64, 5, 9, 2047, 561] {
            assert_eq!(j(1, m), 1);
        }
    }

    #[test]
    fn jacobi_negative_numerators() {
        // 2047 = 3 mod 4, so -1 is a non-residue symbol and -2 = 2045.
        assert_eq!(j(-1, 2047), -1);
        assert_eq!(j(-2, 2047), j(2045, 2047));
        assert_eq!(j(-2, 3215031751), j(3215031749, 3215031751));
    }

    #[test]
    fn jacobi_rejects_bad_modulus() {
        assert!(jacobi(&BigInt::from(3), &n(10)).is_err());
        assert!(jacobi(&BigInt::from(3), &n(1)).is_err());
        assert!(jacobi_nat(&n(3), &n(0)).is_err());
    }

    #[test]
    fn modexp_examples() {
        assert_eq!(modexp(&n(2), &n(340), &n(341)).unwrap(), n(1));
        assert_eq!(modexp(&n(2), &n(170), &n(341)).unwrap(), n(1));
        assert_eq!(modexp(&n(12345), &n(0), &n(77)).unwrap(), n(1));
        assert!(modexp(&n(2), &n(3), &n(1)).is_err());
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&n(589)), (n(24), false));
        assert_eq!(isqrt(&n(25)), (n(5), true));
        assert_eq!(isqrt(&n(0)), (n(0), true));
        let big = BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap();
        let (s, _) = isqrt(&big);
        assert!(&s * &s <= big && (&s + 1u8) * (&s + 1u8) > big);
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime(&n(2)), n(3));
        assert_eq!(next_prime(&n(7)), n(11));
        assert_eq!(next_prime(&n(13)), n(17));
        assert_eq!(next_prime(&n(0)), n(2));
        assert_eq!(next_prime(&n(1)), n(2));
    }

    #[test]
    fn is_prime_u64_matches_sieve() {
        let limit = 20_000usize;
        let mut sieve = vec![true; limit];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..limit {
            if sieve[i] {
                for k in (i * i..limit).step_by(i) {
                    sieve[k] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(i as u64), p, "{i}");
        }
        // Strong pseudoprimes to several bases.
        assert!(!is_prime_u64(3215031751));
        assert!(!is_prime_u64(3825123056546413051));
        assert!(is_prime_u64(18446744073709551557));
    }

    #[test]
    fn lof_tpow_examples() {
        assert_eq!(lof_tpow(&n(340)).unwrap(), OddFactorDecomp { delta: n(85), t: 2 });
        assert_eq!(lof_tpow(&n(1022)).unwrap(), OddFactorDecomp { delta: n(511), t: 1 });
        assert_eq!(lof_tpow(&n(1)).unwrap(), OddFactorDecomp { delta: n(1), t: 0 });
        assert!(matches!(lof_tpow(&n(0)), Err(Error::ZeroDecomposition)));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&n(561), &n(3)), n(3));
        assert_eq!(gcd(&n(2047), &n(23)), n(23));
        assert_eq!(gcd(&n(7), &n(0)), n(7));
        assert_eq!(gcd(&n(0), &n(0)), n(0));
    }

    /// Brute-force reference: counts units by Jacobi value using Euler's
    /// criterion per prime factor.
    fn count_by_legendre_product(m: u64) -> (u64, u64) {
        let mut factors = vec![];
        let mut r = m;
        let mut p = 3;
        while p * p <= r {
            while r % p == 0 {
                factors.push(p);
                r /= p;
            }
            p += 2;
        }
        if r > 1 {
            factors.push(r);
        }
        let (mut neg, mut pos) = (0, 0);
        for a in 1..m {
            let mut sym = 1i64;
            for &f in &factors {
                let e = powmod_u64(a % f, (f - 1) / 2, f);
                sym *= match e {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
            }
            match sym {
                -1 => neg += 1,
                1 => pos += 1,
                _ => {}
            }
        }
        (neg, pos)
    }

    #[test]
    fn count_qnr_examples() {
        assert_eq!(count_by_legendre_product(15), (4, 4));
        assert_eq!(count_by_legendre_product(7), (3, 3));
        assert_eq!(count_qnr(15).unwrap(), (4, 4));
        assert_eq!(count_qnr(7).unwrap(), (3, 3));
        assert!(matches!(count_qnr(9), Err(Error::PerfectSquare(_))));
        assert!(count_qnr(10).is_err());
    }

    #[test]
    fn jacobi_zero_iff_common_factor() {
        for m in (3u64..=2001).step_by(2) {
            let big_m = n(m);
            for a in 0..m {
                let sym = jacobi_nat(&n(a), &big_m).unwrap();
                let shares = gcd(&n(a), &big_m) > BigUint::one();
                assert_eq!(sym == 0, shares, "a={a} n={m}");
            }
        }
    }

    #[test]
    fn euler_criterion_for_primes() {
        for p in (3u64..2000).filter(|&p| is_prime_u64(p)) {
            for a in 1..p {
                let sym = jacobi_nat(&n(a), &n(p)).unwrap();
                let e = powmod_u64(a, (p - 1) / 2, p);
                let expected = if sym == 1 { 1 } else { p - 1 };
                assert_eq!(e, expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn count_qnr_half_of_totient() {
        for m in (3u64..10_000).step_by(2) {
            if isqrt(&n(m)).1 {
                continue;
            }
            let phi = (1..m).filter(|&a| num_integer::gcd(a, m) == 1).count() as u64;
            assert_eq!(count_qnr(m).unwrap(), (phi / 2, phi / 2), "n={m}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10_000))]

            #[test]
            fn jacobi_is_multiplicative(a in 0u64..1_000_000, b in 0u64..1_000_000, half in 1u64..500_000) {
                let m = n(2 * half + 1);
                let ab = n(a) * n(b);
                prop_assert_eq!(
                    jacobi_nat(&ab, &m).unwrap(),
                    jacobi_nat(&n(a), &m).unwrap() * jacobi_nat(&n(b), &m).unwrap()
                );
            }

            #[test]
            fn isqrt_brackets(v in any::<u128>()) {
                let big = BigUint::from(v);
                let (s, exact) = isqrt(&big);
                prop_assert!(&s * &s <= big);
                prop_assert!((&s + 1u8) * (&s + 1u8) > big);
                prop_assert_eq!(exact, &s * &s == big);
            }

            #[test]
            fn lof_tpow_recomposes(v in 1u64..u64::MAX) {
                let d = lof_tpow(&n(v)).unwrap();
                prop_assert!(d.delta.is_odd());
                prop_assert_eq!(d.recompose(), n(v));
            }
        }
    }
}

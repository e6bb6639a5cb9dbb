//! Canonical divisor polynomials derived from prime-power cyclotomics, and
//! the search for the canonical parameter `m`.
//!
//! For `m = p^k` the cyclotomic polynomial `Phi_m(x)` is palindromic of even
//! degree `2d`. Substituting `t = x + 1/x` folds it into the monic degree-`d`
//! polynomial `Upsilon_m(t)`; substituting `t = sqrt(u^2 + 4)` into that and
//! clearing the radical yields `Psi_m(u)`. For a modulus `n` with
//! `gcd(m, n) = 1` and `n mod m != 1`, at least one of the two derived
//! polynomials has no root mod `n`, which makes each of them a usable
//! divisor polynomial for the binomial congruence.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ntcore::{is_prime_u64, jacobi_nat, next_prime_u64, perfect_square_root};
use crate::polyring::Poly;
use crate::{Error, Natural, Result};

/// Polynomial with integer coefficients, ascending degree order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last().is_some_and(|c| c.is_one())
    }

    fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        Self::new((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.0.is_empty() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); k];
        out.extend(self.0.iter().cloned());
        Self(out)
    }

    /// Reduction into `Z_n[x]`.
    pub fn reduce(&self, n: &Natural) -> Poly {
        Poly::from_signed(&self.0, n.clone())
    }

    /// Evaluates at `x` modulo `n` by Horner's rule.
    pub fn eval_mod(&self, x: u64, n: u64) -> u64 {
        let n128 = n as i128;
        let mut acc: i128 = 0;
        for c in self.0.iter().rev() {
            let c = (c % BigInt::from(n)).to_i128().unwrap_or(0).rem_euclid(n128);
            acc = (acc * x as i128 + c).rem_euclid(n128);
        }
        acc as u64
    }

    /// Human-readable form in the given variable, highest degree first,
    /// e.g. `t^4 - 4t^2 + 2`.
    pub fn render(&self, var: &str) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let coeff = if mag.is_one() && k > 0 { String::new() } else { mag.to_string() };
            out.push_str(&coeff);
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

/// `(p, k)` with `m = p^k`, or `None` if `m` is not a prime power.
pub fn prime_power_decompose(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m % d == 0)?;
    let mut rest = m;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1 && is_prime_u64(p)).then_some((p, k))
}

fn check_prime_power(m: u64) -> Result<(u64, u32)> {
    match prime_power_decompose(m) {
        Some(pk) if m >= 3 => Ok(pk),
        _ => Err(Error::NotPrimePower(BigUint::from(m))),
    }
}

/// `Phi_{p^k}(x) = sum_{i < p} x^(i p^(k-1))`.
pub fn cyclotomic_prime_power(m: u64) -> Result<IntPoly> {
    let (p, k) = check_prime_power(m)?;
    let stride = p.pow(k - 1) as usize;
    let mut coeffs = vec![BigInt::zero(); (p as usize - 1) * stride + 1];
    for i in 0..p as usize {
        coeffs[i * stride] = BigInt::one();
    }
    Ok(IntPoly::new(coeffs))
}

/// Folds the palindromic `Phi_m` through `t = x + 1/x`.
pub fn upsilon_of(m: u64) -> Result<IntPoly> {
    let phi = cyclotomic_prime_power(m)?;
    let d = phi.degree().unwrap_or(0) / 2;
    let c = phi.coeffs();
    // basis[j] = x^j + x^-j expressed in t.
    let t = IntPoly::from_i64s(&[0, 1]);
    let mut basis = vec![IntPoly::from_i64s(&[2]), t.clone()];
    for j in 2..=d {
        let next = t.mul(&basis[j - 1]).sub(&basis[j - 2]);
        basis.push(next);
    }
    let mut ups = IntPoly::new(vec![c[d].clone()]);
    for j in 1..=d {
        ups = ups.add(&basis[j].scale(&c[d - j]));
    }
    Ok(ups)
}

/// Clears `t = sqrt(u^2 + 4)` from `Upsilon_m(t)`, normalized to be monic.
pub fn psi_of(m: u64) -> Result<IntPoly> {
    Ok(psi_from_upsilon(&upsilon_of(m)?))
}

fn psi_from_upsilon(ups: &IntPoly) -> IntPoly {
    // t^(2i) = (u^2 + 4)^i lands in the rational part, t^(2i+1) in the
    // cofactor of the radical.
    let w = IntPoly::from_i64s(&[4, 0, 1]);
    let mut w_pow = IntPoly::from_i64s(&[1]);
    let mut even = IntPoly::default();
    let mut odd = IntPoly::default();
    for (j, c) in ups.coeffs().iter().enumerate() {
        if j >= 2 && j % 2 == 0 {
            w_pow = w_pow.mul(&w);
        }
        let term = w_pow.scale(c);
        if j % 2 == 0 {
            even = even.add(&term);
        } else {
            odd = odd.add(&term);
        }
    }
    let psi = if odd.degree().is_none() {
        even
    } else {
        w.mul(&odd.mul(&odd)).sub(&even.mul(&even))
    };
    match psi.coeffs().last() {
        Some(lead) if lead.is_negative() => psi.scale(&BigInt::from(-1)),
        _ => psi,
    }
}

/// The tuple `(m, p_m, k, d, Upsilon_m, Psi_m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalParams {
    pub m: u64,
    pub p_m: u64,
    pub k: u32,
    pub d: usize,
    pub upsilon: IntPoly,
    pub psi: IntPoly,
}

impl CanonicalParams {
    pub fn new(m: u64) -> Result<Self> {
        let (p_m, k) = check_prime_power(m)?;
        let upsilon = upsilon_of(m)?;
        let psi = psi_from_upsilon(&upsilon);
        let d = upsilon.degree().unwrap_or(0);
        Ok(Self { m, p_m, k, d, upsilon, psi })
    }

    /// Shared, memoized parameters for `m`.
    pub fn cached(m: u64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CanonicalParams>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(hit) = cache.read().expect("params cache poisoned").get(&m) {
            return Ok(Arc::clone(hit));
        }
        let params = Arc::new(Self::new(m)?);
        let mut w = cache.write().expect("params cache poisoned");
        Ok(Arc::clone(w.entry(m).or_insert(params)))
    }

    pub fn cyclotomic(&self) -> IntPoly {
        cyclotomic_prime_power(self.m).expect("m validated at construction")
    }
}

/// Exactly one of the three things the parameter search can produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FindResult {
    /// `n` is the square of this root.
    Square(Natural),
    /// This prime divides `n`.
    Divisor(Natural),
    /// This prime is an explicit non-residue of `n`.
    Qnr(u64),
    /// The canonical parameter.
    Param(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FindOutcome {
    pub result: FindResult,
    /// Passes through the prime loop; zero when the square screen fires.
    pub iterations: u64,
}

/// Walks primes `2, 3, 5, ...` collecting the prime powers dividing `n - 1`
/// until either a small divisor, an explicit non-residue, or the
/// minimal-degree canonical parameter emerges. Requires `n mod 24 = 1`.
pub fn find_qnr_or_m(n: &Natural) -> Result<FindOutcome> {
    if (n % 24u8) != BigUint::one() {
        return Err(Error::NotOneMod24(n.clone()));
    }
    if let Some(s) = perfect_square_root(n) {
        return Ok(FindOutcome { result: FindResult::Square(s), iterations: 0 });
    }

    let n_minus_1 = n - 1u8;
    let cap = 4 * n.bits().max(8);
    let mut myprod = BigUint::one();
    let mut p: u64 = 2;
    let mut deg: Option<BigUint> = None;
    let mut m: Option<BigUint> = None;
    let mut iterations = 0;

    while myprod <= n_minus_1 {
        iterations += 1;
        if iterations > cap {
            return Err(Error::ParameterSearchExhausted { n: n.clone(), cap });
        }
        let big_p = BigUint::from(p);
        let r = n % &big_p;
        if r.is_zero() {
            return Ok(FindOutcome { result: FindResult::Divisor(big_p), iterations });
        }
        if r.is_one() {
            // Smallest k with p^k not dividing n - 1.
            let mut k = 2u32;
            let mut pk = &big_p * &big_p;
            while (&n_minus_1 % &pk).is_zero() {
                k += 1;
                pk *= &big_p;
            }
            let pk_minus_1 = &pk / &big_p;
            if p == 2 {
                deg = Some(BigUint::one() << (k - 2));
                m = Some(pk);
            } else {
                let current = deg.as_ref().expect("p = 2 runs first for odd n");
                let tdeg = BigUint::from((p - 1) / 2) * &pk_minus_1;
                if tdeg < *current {
                    deg = Some(tdeg);
                    m = Some(pk);
                }
            }
            myprod *= pk_minus_1;
            if myprod > n_minus_1 {
                break;
            }
            p = next_prime_u64(p).expect("prime walk stays far below 2^64");
        } else {
            if jacobi_nat(&r, &big_p)? == -1 {
                return Ok(FindOutcome { result: FindResult::Qnr(p), iterations });
            }
            let current = deg.as_ref().expect("p = 2 runs first for odd n");
            let tdeg = BigUint::from((p - 1) / 2);
            if tdeg < *current {
                m = Some(big_p);
            }
            break;
        }
    }

    let m = m.expect("p = 2 always records a candidate");
    let m = m.to_u64().ok_or_else(|| Error::ParameterSearchExhausted { n: n.clone(), cap })?;
    Ok(FindOutcome { result: FindResult::Param(m), iterations })
}

/// Roots of `Upsilon_m` mod a small `n`, by exhaustive scan.
pub fn upsilon_roots(m: u64, n: u64) -> Result<Vec<u64>> {
    let ups = upsilon_of(m)?;
    Ok((0..n).filter(|&x| ups.eval_mod(x, n) == 0).collect())
}

/// Jacobi symbol `(n / p_m)` used by the fourth condition; `p_m` odd.
pub(crate) fn jacobi_of_n_wrt_base(n: &Natural, p_m: u64) -> Result<i8> {
    jacobi_nat(n, &BigUint::from(p_m))
}

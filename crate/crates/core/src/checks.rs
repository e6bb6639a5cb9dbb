//! The detection predicates: Euler criterion, the binomial congruence over
//! `Z_n[sqrt(q)]`, and the canonical-polynomial conditions.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::canonical::{jacobi_of_n_wrt_base, CanonicalParams};
use crate::ntcore::{jacobi, modexp};
use crate::polyring::{mbec_remainder, Poly, QuotientRing};
use crate::quadext::{QuadCtx, QuadInt};
use crate::{Error, Natural, Result};

/// `(q^((n-1)/2) - jacobi(q, n)) mod n`; zero iff Euler's criterion holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EccResult {
    pub value: Natural,
}

impl EccResult {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// Coordinates of `(1 + sqrt(q))^n - 1 - sqrt(q)^n = a + b*sqrt(q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BccResult {
    pub a: Natural,
    pub b: Natural,
}

impl BccResult {
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

fn check_odd(n: &Natural) -> Result<()> {
    if n.is_even() || *n < BigUint::from(3u8) {
        Err(Error::InvalidModulus(n.clone()))
    } else {
        Ok(())
    }
}

pub fn ecc(q: &BigInt, n: &Natural) -> Result<EccResult> {
    check_odd(n)?;
    let sym = jacobi(q, n)?;
    let q_mod = q.mod_floor(&BigInt::from(n.clone())).magnitude().clone();
    if sym == 0 {
        return Err(Error::JacobiZero { q: q_mod, n: n.clone() });
    }
    let half = (n - 1u8) >> 1;
    let pow = modexp(&q_mod, &half, n)?;
    let value = if sym == 1 {
        (pow + n - 1u8) % n
    } else {
        (pow + 1u8) % n
    };
    Ok(EccResult { value })
}

pub fn bcc(q: &BigInt, n: &Natural) -> Result<BccResult> {
    check_odd(n)?;
    let ctx = QuadCtx::new(n.clone(), q)?;
    let lhs = QuadInt::new(&ctx, BigUint::one(), BigUint::one()).pow(n);
    // sqrt(q)^n = q^((n-1)/2) * sqrt(q) for odd n.
    let half = (n - 1u8) >> 1;
    let radical_pow = modexp(ctx.radicand(), &half, n)?;
    let a = (lhs.real() + n - 1u8) % n;
    let b = (lhs.radical_coeff() + n - radical_pow) % n;
    Ok(BccResult { a, b })
}

/// Results of the four canonical-polynomial conditions for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgpcReport {
    pub m: u64,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub cond4: bool,
    /// Binomial remainder modulo `Upsilon_m`.
    pub upsilon_remainder: Poly,
    /// Binomial remainder modulo `Psi_m`.
    pub psi_remainder: Poly,
    /// `x^(n^d - 1)` modulo `Upsilon_m`.
    pub upsilon_power: Poly,
    /// `x^(n^d - 1)` modulo `Psi_m`.
    pub psi_power: Poly,
    /// What `psi_power` must equal: 1, or `jacobi(n, p_m)` as a residue.
    pub psi_power_expected: Natural,
}

impl PgpcReport {
    pub fn all_hold(&self) -> bool {
        self.cond1 && self.cond2 && self.cond3 && self.cond4
    }

    /// Numbers (1-4) of the conditions that failed.
    pub fn failed(&self) -> Vec<u8> {
        [self.cond1, self.cond2, self.cond3, self.cond4]
            .iter()
            .zip(1u8..)
            .filter(|(ok, _)| !**ok)
            .map(|(_, i)| i)
            .collect()
    }
}

/// `x^(n^d - 1)` in `Z_n[x]/<divisor>`.
pub fn x_power_order(n: &Natural, divisor: &Poly, d: usize) -> Result<Poly> {
    let ring = QuotientRing::new(divisor.clone())?;
    let e = n.pow(d as u32) - 1u8;
    ring.powmod(&Poly::x(n.clone()), &e)
}

/// Residue that `x^(n^d - 1) mod Psi_m` must equal for prime `n`.
pub fn psi_power_target(n: &Natural, params: &CanonicalParams) -> Result<Natural> {
    if params.p_m == 2 {
        return Ok(BigUint::one());
    }
    Ok(match jacobi_of_n_wrt_base(n, params.p_m)? {
        1 => BigUint::one(),
        -1 => n - 1u8,
        _ => BigUint::zero(),
    })
}

pub fn pgpc_check(n: &Natural, params: &CanonicalParams) -> Result<PgpcReport> {
    check_odd(n)?;
    let ups = params.upsilon.reduce(n);
    let psi = params.psi.reduce(n);
    let upsilon_remainder = mbec_remainder(n, &ups)?;
    let psi_remainder = mbec_remainder(n, &psi)?;
    let upsilon_power = x_power_order(n, &ups, params.d)?;
    let psi_power = x_power_order(n, &psi, params.d)?;
    let psi_power_expected = psi_power_target(n, params)?;
    Ok(PgpcReport {
        m: params.m,
        cond1: upsilon_remainder.is_zero(),
        cond2: psi_remainder.is_zero(),
        cond3: upsilon_power.is_one(),
        cond4: psi_power.as_constant().as_ref() == Some(&psi_power_expected),
        upsilon_remainder,
        psi_remainder,
        upsilon_power,
        psi_power,
        psi_power_expected,
    })
}

/// The single binomial condition modulo `Psi_m`.
pub fn fgpc_check(n: &Natural, params: &CanonicalParams) -> Result<(bool, Poly)> {
    check_odd(n)?;
    let rem = mbec_remainder(n, &params.psi.reduce(n))?;
    Ok((rem.is_zero(), rem))
}

//! Dense polynomials over `Z_n` and the quotient rings `Z_n[x]/<D(x)>`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Natural, Result};

/// Polynomial over `Z_n`, coefficients in ascending degree order.
///
/// The zero polynomial has no coefficients; otherwise the last coefficient
/// is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Natural>,
    modulus: Natural,
}

impl Poly {
    pub fn new(coeffs: Vec<Natural>, modulus: Natural) -> Self {
        let mut coeffs: Vec<Natural> = coeffs.into_iter().map(|c| c % &modulus).collect();
        trim(&mut coeffs);
        Self { coeffs, modulus }
    }

    /// Reduces integer coefficients (ascending order) into `[0, n)`.
    pub fn from_signed(coeffs: &[BigInt], modulus: Natural) -> Self {
        let signed = BigInt::from_biguint(Sign::Plus, modulus.clone());
        let coeffs = coeffs
            .iter()
            .map(|c| c.mod_floor(&signed).magnitude().clone())
            .collect();
        Self::new(coeffs, modulus)
    }

    pub fn from_u64s(coeffs: &[u64], modulus: Natural) -> Self {
        Self::new(coeffs.iter().map(|&c| BigUint::from(c)).collect(), modulus)
    }

    pub fn zero(modulus: Natural) -> Self {
        Self { coeffs: vec![], modulus }
    }

    pub fn one(modulus: Natural) -> Self {
        Self::new(vec![BigUint::one()], modulus)
    }

    /// `c * x^k`.
    pub fn monomial(c: Natural, k: usize, modulus: Natural) -> Self {
        let mut coeffs = vec![BigUint::zero(); k];
        coeffs.push(c);
        Self::new(coeffs, modulus)
    }

    pub fn x(modulus: Natural) -> Self {
        Self::monomial(BigUint::one(), 1, modulus)
    }

    pub fn coeffs(&self) -> &[Natural] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> Natural {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn modulus(&self) -> &Natural {
        &self.modulus
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The constant term if the polynomial has degree <= 0.
    pub fn as_constant(&self) -> Option<Natural> {
        match self.coeffs.len() {
            0 => Some(BigUint::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    fn check_modulus(&self, other: &Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Ok(Self::new(coeffs, self.modulus.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i) + &self.modulus - other.coeff(i))
            .collect();
        Ok(Self::new(coeffs, self.modulus.clone()))
    }

    /// Full product, no divisor reduction.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_modulus(other)?;
        Ok(Self::new(raw_product(&self.coeffs, &other.coeffs), self.modulus.clone()))
    }
}

fn trim(coeffs: &mut Vec<Natural>) {
    while coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
}

/// Unreduced schoolbook product.
fn raw_product(a: &[Natural], b: &[Natural]) -> Vec<Natural> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Unreduced square, using the symmetric cross terms once.
fn raw_square(a: &[Natural]) -> Vec<Natural> {
    if a.is_empty() {
        return vec![];
    }
    let mut out = vec![BigUint::zero(); 2 * a.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        out[2 * i] += x * x;
        for (j, y) in a.iter().enumerate().skip(i + 1) {
            out[i + j] += (x * y) << 1u8;
        }
    }
    out
}

impl fmt::Display for Poly {
    /// `c_k*x^k + ... + c_1*x + c_0`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// `Z_n[x]/<D(x)>` for a monic divisor of degree >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientRing {
    divisor: Poly,
    /// `n - d_j` for the non-leading divisor coefficients.
    neg_tail: Vec<Natural>,
}

impl QuotientRing {
    pub fn new(divisor: Poly) -> Result<Self> {
        if divisor.is_zero() || !divisor.is_monic() || divisor.degree() == Some(0) {
            return Err(Error::BadDivisor);
        }
        let n = divisor.modulus.clone();
        let delta = divisor.coeffs.len() - 1;
        let neg_tail = divisor.coeffs[..delta]
            .iter()
            .map(|c| (&n - c) % &n)
            .collect();
        Ok(Self { divisor, neg_tail })
    }

    pub fn divisor(&self) -> &Poly {
        &self.divisor
    }

    pub fn modulus(&self) -> &Natural {
        &self.divisor.modulus
    }

    /// Degree of the divisor.
    pub fn degree(&self) -> usize {
        self.neg_tail.len()
    }

    /// Reduces an unreduced coefficient vector by the divisor.
    ///
    /// Entries may exceed `n`; each leading coefficient is reduced just
    /// before it is eliminated, and the surviving low entries once at the end.
    fn reduce_raw(&self, mut c: Vec<Natural>) -> Poly {
        let n = self.modulus();
        let delta = self.degree();
        if c.len() > delta {
            for i in (delta..c.len()).rev() {
                let lead = std::mem::take(&mut c[i]) % n;
                if lead.is_zero() {
                    continue;
                }
                let base = i - delta;
                for (j, t) in self.neg_tail.iter().enumerate() {
                    c[base + j] += &lead * t;
                }
            }
            c.truncate(delta);
        }
        Poly::new(c, n.clone())
    }

    pub fn reduce(&self, p: &Poly) -> Result<Poly> {
        self.check(p)?;
        Ok(self.reduce_raw(p.coeffs.clone()))
    }

    fn check(&self, p: &Poly) -> Result<()> {
        if p.modulus == *self.modulus() {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.reduce_raw(raw_product(&a.coeffs, &b.coeffs)))
    }

    fn square(&self, a: &Poly) -> Poly {
        self.reduce_raw(raw_square(&a.coeffs))
    }

    /// Left-to-right square-and-reduce.
    pub fn powmod(&self, base: &Poly, e: &BigUint) -> Result<Poly> {
        let base = self.reduce(base)?;
        let mut acc = Poly::one(self.modulus().clone());
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.reduce_raw(raw_product(&acc.coeffs, &base.coeffs));
            }
        }
        Ok(acc)
    }
}

pub fn poly_mulmod(r: &QuotientRing, p1: &Poly, p2: &Poly) -> Result<Poly> {
    r.mulmod(p1, p2)
}

pub fn poly_powmod(r: &QuotientRing, base: &Poly, e: &BigUint) -> Result<Poly> {
    r.powmod(base, e)
}

/// `((1 + x)^n - 1 - x^n) mod <d(x), n>`; zero iff the binomial congruence
/// holds for this divisor.
pub fn mbec_remainder(n: &Natural, d: &Poly) -> Result<Poly> {
    if n.is_even() || *n < BigUint::from(3u8) {
        return Err(Error::InvalidModulus(n.clone()));
    }
    if d.modulus != *n {
        return Err(Error::ContextMismatch);
    }
    let ring = QuotientRing::new(d.clone())?;
    let one = Poly::one(n.clone());
    let x = Poly::x(n.clone());
    let lhs = ring.powmod(&x.add(&one)?, n)?;
    let xn = ring.powmod(&x, n)?;
    lhs.sub(&one)?.sub(&xn)
}

/// Outcome of reducing `x^(n-1)` modulo `x^2 - q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EulerPolyOutcome {
    Constant(Natural),
    NonConstant(Poly),
}

/// `x^(n-1) mod <x^2 - q, n>`, which equals the Jacobi symbol of `q` when
/// `n` is prime.
pub fn euler_poly_check(n: &Natural, q: &Natural) -> Result<EulerPolyOutcome> {
    if n.is_even() || *n < BigUint::from(3u8) {
        return Err(Error::InvalidModulus(n.clone()));
    }
    let neg_q = (n - (q % n)) % n;
    let divisor = Poly::new(vec![neg_q, BigUint::zero(), BigUint::one()], n.clone());
    let ring = QuotientRing::new(divisor)?;
    let r = ring.powmod(&Poly::x(n.clone()), &(n - 1u8))?;
    Ok(match r.as_constant() {
        Some(c) => EulerPolyOutcome::Constant(c),
        None => EulerPolyOutcome::NonConstant(r),
    })
}

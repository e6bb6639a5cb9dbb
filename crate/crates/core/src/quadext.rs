//! Arithmetic in `Z_n[sqrt(q)]`, with `sqrt(q)` kept as a formal symbol.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Natural, Result};

/// Modulus `n` and the residue `q` under the radical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadCtx {
    n: Natural,
    q: Natural,
}

impl QuadCtx {
    /// `q` may be negative; it is stored reduced into `[0, n)`, so `-2` and
    /// `n - 2` name the same ring.
    pub fn new(n: Natural, q: &BigInt) -> Result<Arc<Self>> {
        if n.is_even() || n < BigUint::from(3u8) {
            return Err(Error::InvalidModulus(n));
        }
        let signed_n = BigInt::from_biguint(Sign::Plus, n.clone());
        let q = q.mod_floor(&signed_n).magnitude().clone();
        Ok(Arc::new(Self { n, q }))
    }

    pub fn with_residue(n: Natural, q: Natural) -> Result<Arc<Self>> {
        Self::new(n, &BigInt::from(q))
    }

    pub fn modulus(&self) -> &Natural {
        &self.n
    }

    pub fn radicand(&self) -> &Natural {
        &self.q
    }

    fn mul_raw(&self, x: (&BigUint, &BigUint), y: (&BigUint, &BigUint)) -> (Natural, Natural) {
        let (a, b) = x;
        let (c, d) = y;
        let real = (a * c + ((b * d) % &self.n) * &self.q) % &self.n;
        let radical = (a * d + b * c) % &self.n;
        (real, radical)
    }

    fn square_raw(&self, a: &BigUint, b: &BigUint) -> (Natural, Natural) {
        let real = (a * a + ((b * b) % &self.n) * &self.q) % &self.n;
        let radical = ((a * b) << 1u8) % &self.n;
        (real, radical)
    }
}

/// `a + b*sqrt(q)` with both coordinates reduced mod `n`.
#[derive(Debug, Clone)]
pub struct QuadInt {
    a: Natural,
    b: Natural,
    ctx: Arc<QuadCtx>,
}

impl PartialEq for QuadInt {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && *self.ctx == *other.ctx
    }
}

impl Eq for QuadInt {}

impl QuadInt {
    pub fn new(ctx: &Arc<QuadCtx>, a: Natural, b: Natural) -> Self {
        let a = a % &ctx.n;
        let b = b % &ctx.n;
        Self { a, b, ctx: Arc::clone(ctx) }
    }

    /// Builds an element from signed coordinates.
    pub fn from_signed(ctx: &Arc<QuadCtx>, a: &BigInt, b: &BigInt) -> Self {
        let n = BigInt::from_biguint(Sign::Plus, ctx.n.clone());
        Self::new(
            ctx,
            a.mod_floor(&n).magnitude().clone(),
            b.mod_floor(&n).magnitude().clone(),
        )
    }

    pub fn one(ctx: &Arc<QuadCtx>) -> Self {
        Self::new(ctx, BigUint::one(), BigUint::zero())
    }

    /// The formal symbol `sqrt(q)`.
    pub fn radical(ctx: &Arc<QuadCtx>) -> Self {
        Self::new(ctx, BigUint::zero(), BigUint::one())
    }

    pub fn real(&self) -> &Natural {
        &self.a
    }

    pub fn radical_coeff(&self) -> &Natural {
        &self.b
    }

    pub fn ctx(&self) -> &Arc<QuadCtx> {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || *self.ctx == *other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let (a, b) = self.ctx.mul_raw((&self.a, &self.b), (&other.a, &other.b));
        Ok(Self { a, b, ctx: Arc::clone(&self.ctx) })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        Ok(Self::new(&self.ctx, &self.a + &other.a, &self.b + &other.b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let n = &self.ctx.n;
        Ok(Self::new(&self.ctx, &self.a + n - &other.a, &self.b + n - &other.b))
    }

    /// Left-to-right square-and-multiply.
    pub fn pow(&self, e: &BigUint) -> Self {
        let mut acc = (BigUint::one() % &self.ctx.n, BigUint::zero());
        for i in (0..e.bits()).rev() {
            acc = self.ctx.square_raw(&acc.0, &acc.1);
            if e.bit(i) {
                acc = self.ctx.mul_raw((&acc.0, &acc.1), (&self.a, &self.b));
            }
        }
        Self { a: acc.0, b: acc.1, ctx: Arc::clone(&self.ctx) }
    }

    /// `a + b*sqrt(q) -> a - b*sqrt(q)`.
    pub fn conjugate(&self) -> Self {
        let b = (&self.ctx.n - &self.b) % &self.ctx.n;
        Self { a: self.a.clone(), b, ctx: Arc::clone(&self.ctx) }
    }

    /// `a^2 - b^2 q mod n`.
    pub fn norm(&self) -> Natural {
        let n = &self.ctx.n;
        let aa = (&self.a * &self.a) % n;
        let bbq = ((&self.b * &self.b) % n * &self.ctx.q) % n;
        (aa + n - bbq) % n
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.ctx.q)
    }
}

pub fn quad_mul(x: &QuadInt, y: &QuadInt) -> Result<QuadInt> {
    x.mul(y)
}

pub fn quad_pow(x: &QuadInt, e: &BigUint) -> QuadInt {
    x.pow(e)
}

pub fn conjugate(x: &QuadInt) -> QuadInt {
    x.conjugate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntcore::{is_prime_u64, jacobi_nat};

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn ctx(m: u64, q: i64) -> Arc<QuadCtx> {
        QuadCtx::new(n(m), &BigInt::from(q)).unwrap()
    }

    #[test]
    fn mul_examples() {
        let c = ctx(7, 2);
        let x = QuadInt::from_signed(&c, &BigInt::from(1), &BigInt::from(1));
        let y = QuadInt::from_signed(&c, &BigInt::from(1), &BigInt::from(-1));
        let p = quad_mul(&x, &y).unwrap();
        assert_eq!((p.real(), p.radical_coeff()), (&n(6), &n(0)));

        let c = ctx(2047, 2045);
        let r = QuadInt::radical(&c);
        let sq = quad_mul(&r, &r).unwrap();
        assert_eq!((sq.real(), sq.radical_coeff()), (&n(2045), &n(0)));

        let x = QuadInt::new(&c, n(1), n(1));
        // (1 + sqrt(q))^2 = (1 + q) + 2*sqrt(q).
        let sq = quad_mul(&x, &x).unwrap();
        assert_eq!((sq.real(), sq.radical_coeff()), (&n(2046), &n(2)));
    }

    #[test]
    fn mul_rejects_foreign_ring() {
        let x = QuadInt::one(&ctx(7, 3));
        let y = QuadInt::one(&ctx(7, 5));
        assert!(matches!(quad_mul(&x, &y), Err(Error::ContextMismatch)));
        // Equal contexts built separately are the same ring.
        assert!(quad_mul(&x, &QuadInt::one(&ctx(7, 3))).is_ok());
    }

    #[test]
    fn negative_radicand_reduces() {
        assert_eq!(ctx(3215031751, -2).radicand(), &n(3215031749));
        assert!(QuadCtx::new(n(10), &BigInt::from(3)).is_err());
    }

    #[test]
    fn pow_examples() {
        let c = ctx(2047, 2045);
        let x = QuadInt::new(&c, n(1), n(1));
        // The raw power; subtracting 1 + sqrt(2045)^2047 = 1 + 2046*sqrt(2045)
        // leaves the binomial defect 1522 + 1068*sqrt(2045).
        let p = quad_pow(&x, &n(2047));
        assert_eq!((p.real(), p.radical_coeff()), (&n(1523), &n(1067)));
        assert_eq!(quad_pow(&x, &n(0)), QuadInt::one(&c));

        // (1 + sqrt(389))^561 = 1 + sqrt(389)^561 mod 561.
        let c = ctx(561, 389);
        let lhs = quad_pow(&QuadInt::new(&c, n(1), n(1)), &n(561));
        let rhs = QuadInt::one(&c).add(&quad_pow(&QuadInt::radical(&c), &n(561))).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugate_examples() {
        let c = ctx(2047, 15);
        let x = QuadInt::new(&c, n(1194), n(322));
        let y = conjugate(&x);
        assert_eq!((y.real(), y.radical_coeff()), (&n(1194), &n(1725)));
        assert_eq!(conjugate(&y), x);
        let r = QuadInt::new(&c, n(5), n(0));
        assert_eq!(conjugate(&r), r);
    }

    #[test]
    fn display_form() {
        let c = ctx(2047, 2045);
        assert_eq!(QuadInt::new(&c, n(1522), n(1068)).to_string(), "1522 + 1068*sqrt(2045)");
    }

    #[test]
    fn odd_powers_of_a_qnr_are_never_one() {
        for p in (3u64..2000).filter(|&p| is_prime_u64(p)) {
            for q in 1..p {
                if jacobi_nat(&n(q), &n(p)).unwrap() != -1 {
                    continue;
                }
                // Walk q^1, q^3, q^5, ... by multiplying with q^2.
                let q2 = q * q % p;
                let mut pw = q;
                for i in 0..(p - 1) / 2 {
                    assert_ne!(pw, 1, "p={p} q={q} i={i}");
                    pw = pw * q2 % p;
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn odd_modulus() -> impl Strategy<Value = u64> {
            (1u64..500_000).prop_map(|h| 2 * h + 1)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn conjugation_commutes_with_powers(
                m in odd_modulus(), q in any::<u64>(), a in any::<u64>(), b in any::<u64>(), l in 0u64..1_000_000
            ) {
                let c = QuadCtx::with_residue(n(m), n(q)).unwrap();
                let x = QuadInt::new(&c, n(a), n(b));
                prop_assert_eq!(quad_pow(&x, &n(l)).conjugate(), quad_pow(&x.conjugate(), &n(l)));
            }

            #[test]
            fn norm_is_multiplicative(
                m in odd_modulus(), q in any::<u64>(), a in any::<u64>(), b in any::<u64>(), c2 in any::<u64>(), d in any::<u64>()
            ) {
                let c = QuadCtx::with_residue(n(m), n(q)).unwrap();
                let x = QuadInt::new(&c, n(a), n(b));
                let y = QuadInt::new(&c, n(c2), n(d));
                let lhs = x.mul(&y).unwrap().norm();
                prop_assert_eq!(lhs, (x.norm() * y.norm()) % n(m));
            }

            #[test]
            fn pow_matches_repeated_multiplication(
                m in odd_modulus(), q in any::<u64>(), a in any::<u64>(), b in any::<u64>(), e in 0u64..64
            ) {
                let c = QuadCtx::with_residue(n(m), n(q)).unwrap();
                let x = QuadInt::new(&c, n(a), n(b));
                let mut acc = QuadInt::one(&c);
                for _ in 0..e {
                    acc = acc.mul(&x).unwrap();
                }
                prop_assert_eq!(quad_pow(&x, &n(e)), acc);
            }
        }
    }
}

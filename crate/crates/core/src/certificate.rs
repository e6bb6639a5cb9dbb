//! JSON certificates and their independent re-verification.
//!
//! Big integers are serialized as decimal strings so that documents survive
//! JSON tooling that would otherwise truncate them to doubles.

use std::str::FromStr;
use std::time::Duration;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algorithms::{Mechanism, Outcome, PrimeBasis, Verdict};
use crate::canonical::{psi_of, CanonicalParams};
use crate::checks::{bcc, ecc, fgpc_check, pgpc_check};
use crate::ntcore::{jacobi_nat, perfect_square_root};
use crate::polyring::mbec_remainder;
use crate::{Error, Natural, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeRecord {
    Prime,
    Composite,
    NotApplicable,
    Inconclusive,
}

impl From<Outcome> for OutcomeRecord {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Prime => Self::Prime,
            Outcome::Composite => Self::Composite,
            Outcome::NotApplicable => Self::NotApplicable,
            Outcome::Inconclusive => Self::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MechanismRecord {
    Even,
    TrivialFactor { p: String },
    JacobiZeroFactor { base: String },
    PerfectSquare { root: String },
    EulerWitness { q: String, ecc: String },
    BinomialWitness { q: String, a: String, b: String },
    /// Remainder coefficients in ascending order of degree.
    PolyBinomialWitness { m: u64, remainder: Vec<String> },
    MrNontrivialRoot { base: String, root: String },
    FermatWitness { base: String },
    PgpcViolation {
        m: u64,
        failed: Vec<u8>,
        upsilon_remainder: Vec<String>,
        psi_remainder: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimeBasisRecord {
    SmallPrime,
    Pbpc { q: String },
    Pgpc { m: u64 },
    Fgpc { m: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QnrSearchRecord {
    pub needed: bool,
    pub iterations: u64,
    pub q: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: String,
    pub algorithm: String,
    pub outcome: OutcomeRecord,
    pub mechanism: Option<MechanismRecord>,
    pub qnr_search: QnrSearchRecord,
    pub prime_basis: Option<PrimeBasisRecord>,
    pub timings: Option<Timings>,
}

fn strs(values: &[Natural]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

impl Certificate {
    pub fn from_verdict(v: &Verdict, algorithm: &str, elapsed: Option<Duration>) -> Self {
        let mechanism = v.mechanism.as_ref().map(|m| match m {
            Mechanism::Even => MechanismRecord::Even,
            Mechanism::TrivialFactor { p } => MechanismRecord::TrivialFactor { p: p.to_string() },
            Mechanism::JacobiZeroFactor { base } => MechanismRecord::JacobiZeroFactor { base: base.to_string() },
            Mechanism::PerfectSquare { root } => MechanismRecord::PerfectSquare { root: root.to_string() },
            Mechanism::EulerWitness { q, ecc } => {
                MechanismRecord::EulerWitness { q: q.to_string(), ecc: ecc.to_string() }
            }
            Mechanism::BinomialWitness { q, a, b } => {
                MechanismRecord::BinomialWitness { q: q.to_string(), a: a.to_string(), b: b.to_string() }
            }
            Mechanism::PolyBinomialWitness { m, remainder } => {
                MechanismRecord::PolyBinomialWitness { m: *m, remainder: strs(remainder.coeffs()) }
            }
            Mechanism::MrNontrivialRoot { base, root } => {
                MechanismRecord::MrNontrivialRoot { base: base.to_string(), root: root.to_string() }
            }
            Mechanism::FermatWitness { base } => MechanismRecord::FermatWitness { base: base.to_string() },
            Mechanism::PgpcViolation { report } => MechanismRecord::PgpcViolation {
                m: report.m,
                failed: report.failed(),
                upsilon_remainder: strs(report.upsilon_remainder.coeffs()),
                psi_remainder: strs(report.psi_remainder.coeffs()),
            },
        });
        let prime_basis = v.prime_basis.as_ref().map(|b| match b {
            PrimeBasis::SmallPrime => PrimeBasisRecord::SmallPrime,
            PrimeBasis::Pbpc { q } => PrimeBasisRecord::Pbpc { q: q.to_string() },
            PrimeBasis::Pgpc { m } => PrimeBasisRecord::Pgpc { m: *m },
            PrimeBasis::Fgpc { m } => PrimeBasisRecord::Fgpc { m: *m },
        });
        Self {
            n: v.n.to_string(),
            algorithm: algorithm.to_string(),
            outcome: v.outcome.into(),
            mechanism,
            qnr_search: QnrSearchRecord {
                needed: v.qnr_search.needed,
                iterations: v.qnr_search.iterations,
                q: v.qnr_search.q.as_ref().map(ToString::to_string),
            },
            prime_basis,
            timings: elapsed.map(|d| Timings { elapsed_us: d.as_micros().try_into().unwrap_or(u64::MAX) }),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn parse_nat(field: &str, s: &str) -> Result<Natural> {
    BigUint::from_str(s).map_err(|_| Error::Certificate(format!("{field}: not a decimal integer: {s:?}")))
}

fn parse_all(field: &str, v: &[String]) -> Result<Vec<Natural>> {
    v.iter().map(|s| parse_nat(field, s)).collect()
}

fn reject(reason: impl Into<String>) -> Error {
    Error::Certificate(reason.into())
}

fn check(cond: bool, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(reject(reason))
    }
}

fn proper_factor(n: &Natural, x: &Natural, field: &str) -> Result<()> {
    let g = x.gcd(n);
    check(!g.is_one() && g != *n, &format!("{field} shares no proper factor with n"))
}

/// Re-checks the witness of a composite certificate from its own fields.
///
/// For prime certificates this re-evaluates the conditions of the rule named
/// in `prime_basis`, which is as strong as that rule and no stronger.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    let n = parse_nat("n", &cert.n)?;
    match cert.outcome {
        OutcomeRecord::Composite => {
            let m = cert.mechanism.as_ref().ok_or_else(|| reject("composite without mechanism"))?;
            verify_composite(&n, m)
        }
        OutcomeRecord::Prime => {
            let b = cert.prime_basis.as_ref().ok_or_else(|| reject("prime without basis"))?;
            verify_prime(&n, b)
        }
        OutcomeRecord::NotApplicable => check(n <= BigUint::one(), "not-applicable is reserved for 0 and 1"),
        OutcomeRecord::Inconclusive => Ok(()),
    }
}

fn verify_composite(n: &Natural, m: &MechanismRecord) -> Result<()> {
    match m {
        MechanismRecord::Even => check(n.is_even() && *n > BigUint::from(2u8), "n is not an even number above 2"),
        MechanismRecord::TrivialFactor { p } => proper_factor(n, &parse_nat("p", p)?, "p"),
        MechanismRecord::JacobiZeroFactor { base } => proper_factor(n, &parse_nat("base", base)?, "base"),
        MechanismRecord::PerfectSquare { root } => {
            let root = parse_nat("root", root)?;
            check(root > BigUint::one() && &root * &root == *n, "root^2 != n")
        }
        MechanismRecord::EulerWitness { q, ecc: value } => {
            let q = parse_nat("q", q)?;
            let value = parse_nat("ecc", value)?;
            let e = ecc(&BigInt::from(q), n)?;
            check(!value.is_zero() && e.value == value, "Euler criterion value does not recompute")
        }
        MechanismRecord::BinomialWitness { q, a, b } => {
            let q = parse_nat("q", q)?;
            let (a, b) = (parse_nat("a", a)?, parse_nat("b", b)?);
            let r = bcc(&BigInt::from(q), n)?;
            check(!(a.is_zero() && b.is_zero()) && r.a == a && r.b == b, "binomial defect does not recompute")
        }
        MechanismRecord::PolyBinomialWitness { m, remainder } => {
            let claimed = parse_all("remainder", remainder)?;
            let psi = psi_of(*m)?.reduce(n);
            let r = mbec_remainder(n, &psi)?;
            check(!claimed.is_empty() && r.coeffs() == claimed.as_slice(), "polynomial remainder does not recompute")
        }
        MechanismRecord::MrNontrivialRoot { root, .. } => {
            let root = parse_nat("root", root)?;
            let minus_one = n - 1u8;
            check(
                root < *n && (&root * &root) % n == BigUint::one() && !root.is_one() && root != minus_one,
                "root is not a nontrivial square root of 1",
            )
        }
        MechanismRecord::FermatWitness { base } => {
            let base = parse_nat("base", base)?;
            check(
                n.is_odd() && !base.modpow(&(n - 1u8), n).is_one(),
                "base^(n-1) = 1, not a Fermat witness",
            )
        }
        MechanismRecord::PgpcViolation { m, failed, upsilon_remainder, psi_remainder } => {
            let params = CanonicalParams::cached(*m)?;
            let report = pgpc_check(n, &params)?;
            let upsilon = parse_all("upsilon_remainder", upsilon_remainder)?;
            let psi = parse_all("psi_remainder", psi_remainder)?;
            check(
                !failed.is_empty()
                    && report.failed() == *failed
                    && report.upsilon_remainder.coeffs() == upsilon.as_slice()
                    && report.psi_remainder.coeffs() == psi.as_slice(),
                "canonical-polynomial report does not recompute",
            )
        }
    }
}

fn verify_prime(n: &Natural, basis: &PrimeBasisRecord) -> Result<()> {
    match basis {
        PrimeBasisRecord::SmallPrime => {
            check(*n == BigUint::from(2u8) || *n == BigUint::from(3u8), "not a small prime")
        }
        PrimeBasisRecord::Pbpc { q } => {
            let q = parse_nat("q", q)?;
            check(jacobi_nat(&q, n)? == -1, "q is not a non-residue")?;
            check(perfect_square_root(n).is_none(), "n is a square")?;
            let q = BigInt::from(q);
            check(ecc(&q, n)?.is_zero() && bcc(&q, n)?.is_zero(), "checks do not vanish")
        }
        PrimeBasisRecord::Pgpc { m } => {
            let params = CanonicalParams::cached(*m)?;
            check(pgpc_check(n, &params)?.all_hold(), "canonical-polynomial conditions fail")
        }
        PrimeBasisRecord::Fgpc { m } => {
            let params = CanonicalParams::cached(*m)?;
            check(fgpc_check(n, &params)?.0, "Psi binomial condition fails")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{enhanced_mr, ppta_eqnr, ppta_inr, InrMode};

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn roundtrip(v: &Verdict) -> Certificate {
        let cert = Certificate::from_verdict(v, "test", Some(Duration::from_micros(5)));
        let back = Certificate::from_json(&cert.to_json().unwrap()).unwrap();
        assert_eq!(back, cert);
        back
    }

    #[test]
    fn composite_certificates_verify() {
        let cases = [
            ppta_eqnr(&n(341)).unwrap(),
            ppta_eqnr(&n(2047)).unwrap(),
            ppta_eqnr(&n(561)).unwrap(),
            ppta_eqnr(&n(289)).unwrap(),
            ppta_eqnr(&n(100)).unwrap(),
            ppta_inr(&n(6368689), InrMode::Pgpc).unwrap(),
            ppta_inr(&n(6368689), InrMode::Fgpc).unwrap(),
            ppta_inr(&n(145), InrMode::Pgpc).unwrap(),
            enhanced_mr(&n(1105), 100, 7).unwrap(),
        ];
        for v in &cases {
            assert_eq!(v.outcome, Outcome::Composite, "{v:?}");
            verify_certificate(&roundtrip(v)).unwrap_or_else(|e| panic!("{v:?}: {e}"));
        }
    }

    #[test]
    fn prime_certificates_verify() {
        for p in [3u64, 97, 569, 7919, 6367] {
            let v = ppta_inr(&n(p), InrMode::Pgpc).unwrap();
            verify_certificate(&roundtrip(&v)).unwrap();
        }
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let mut cert = roundtrip(&ppta_eqnr(&n(2047)).unwrap());
        if let Some(MechanismRecord::BinomialWitness { a, .. }) = cert.mechanism.as_mut() {
            *a = "1521".into();
        }
        assert!(verify_certificate(&cert).is_err());

        let mut cert = roundtrip(&ppta_eqnr(&n(561)).unwrap());
        cert.mechanism = Some(MechanismRecord::TrivialFactor { p: "5".into() });
        assert!(verify_certificate(&cert).is_err());

        let mut cert = roundtrip(&ppta_eqnr(&n(561)).unwrap());
        cert.mechanism = Some(MechanismRecord::MrNontrivialRoot { base: "2".into(), root: "560".into() });
        assert!(verify_certificate(&cert).is_err());

        let mut cert = roundtrip(&ppta_eqnr(&n(561)).unwrap());
        cert.n = "56x".into();
        assert!(matches!(verify_certificate(&cert), Err(Error::Certificate(_))));
    }

    #[test]
    fn json_shape() {
        let cert = Certificate::from_verdict(&ppta_eqnr(&n(341)).unwrap(), "eqnr", None);
        let value: serde_json::Value = serde_json::from_str(&cert.to_json().unwrap()).unwrap();
        assert_eq!(value["n"], "341");
        assert_eq!(value["outcome"], "composite");
        assert_eq!(value["mechanism"]["kind"], "euler_witness");
        assert_eq!(value["mechanism"]["ecc"], "2");
        assert_eq!(value["qnr_search"]["needed"], false);
        assert!(value["timings"].is_null());
    }
}

//! The complete primality tests.
//!
//! Every entry point is a pure function of its inputs (plus an explicit seed
//! for the randomized hybrid) and returns a [`Verdict`] whose fields alone are
//! enough to re-check a composite finding; see [`crate::certificate`].

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::canonical::{find_qnr_or_m, CanonicalParams, FindResult};
use crate::checks::{bcc, ecc, fgpc_check, pgpc_check, PgpcReport};
use crate::ntcore::{isqrt, jacobi_nat, lof_tpow, low_u64, next_prime, perfect_square_root};
use crate::polyring::Poly;
use crate::{Error, Natural, Result};

/// Default cap on QNR-search iterations.
pub const DEFAULT_MAX_QNR_ITERS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Prime,
    Composite,
    /// Inputs 0 and 1, which are neither prime nor composite.
    NotApplicable,
    /// The randomized hybrid ran out of draws without a decision.
    Inconclusive,
}

/// How a composite was exposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    Even,
    /// Small prime found by a divisibility screen.
    TrivialFactor { p: Natural },
    /// `jacobi(base, n) = 0`, so `gcd(base, n)` is a proper factor.
    JacobiZeroFactor { base: Natural },
    PerfectSquare { root: Natural },
    /// `ecc(q, n) != 0`.
    EulerWitness { q: Natural, ecc: Natural },
    /// `(1 + sqrt(q))^n - 1 - sqrt(q)^n = a + b*sqrt(q) != 0`.
    BinomialWitness { q: Natural, a: Natural, b: Natural },
    /// Nonzero binomial remainder modulo `Psi_m`.
    PolyBinomialWitness { m: u64, remainder: Poly },
    /// `root^2 = 1` with `root != +-1`.
    MrNontrivialRoot { base: Natural, root: Natural },
    /// `base^(n-1) != 1`.
    FermatWitness { base: Natural },
    PgpcViolation { report: Box<PgpcReport> },
}

/// Which sufficiency rule a prime verdict rests on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeBasis {
    /// 2 and 3, settled before any of the tests apply.
    SmallPrime,
    Pbpc { q: Natural },
    Pgpc { m: u64 },
    Fgpc { m: u64 },
}

/// Bookkeeping for the non-residue search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QnrSearch {
    pub needed: bool,
    pub iterations: u64,
    /// The non-residue in use, when one was found or chosen.
    pub q: Option<Natural>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub n: Natural,
    pub outcome: Outcome,
    pub mechanism: Option<Mechanism>,
    pub prime_basis: Option<PrimeBasis>,
    pub qnr_search: QnrSearch,
}

impl Verdict {
    fn composite(n: &Natural, mechanism: Mechanism, qnr_search: QnrSearch) -> Self {
        Self {
            n: n.clone(),
            outcome: Outcome::Composite,
            mechanism: Some(mechanism),
            prime_basis: None,
            qnr_search,
        }
    }

    fn prime(n: &Natural, basis: PrimeBasis, qnr_search: QnrSearch) -> Self {
        Self {
            n: n.clone(),
            outcome: Outcome::Prime,
            mechanism: None,
            prime_basis: Some(basis),
            qnr_search,
        }
    }

    fn bare(n: &Natural, outcome: Outcome) -> Self {
        Self {
            n: n.clone(),
            outcome,
            mechanism: None,
            prime_basis: None,
            qnr_search: QnrSearch::default(),
        }
    }

    pub fn is_prime(&self) -> bool {
        self.outcome == Outcome::Prime
    }
}

/// Runtime knobs shared by the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub max_qnr_iters: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { max_qnr_iters: DEFAULT_MAX_QNR_ITERS }
    }
}

impl Options {
    /// Honors `PPT_MAX_QNR_ITERS` when it parses as a positive integer.
    pub fn from_env() -> Self {
        let max_qnr_iters = std::env::var("PPT_MAX_QNR_ITERS")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .unwrap_or(DEFAULT_MAX_QNR_ITERS);
        Self { max_qnr_iters }
    }

    /// `min(floor(sqrt(n)), max_qnr_iters)`.
    pub fn qnr_iter_limit(&self, n: &Natural) -> u64 {
        let (s, _) = isqrt(n);
        s.to_u64().map_or(self.max_qnr_iters, |s| s.min(self.max_qnr_iters))
    }
}

/// Which composite-exposing event Miller-Rabin found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MrKind {
    NontrivialRoot(Natural),
    FermatViolation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrOutcome {
    pub kind: Option<MrKind>,
}

impl MrOutcome {
    pub fn witness(&self) -> bool {
        self.kind.is_some()
    }
}

/// One Miller-Rabin round: `B = a^delta`, then `t` squarings, where
/// `n - 1 = delta * 2^t`.
pub fn miller_rabin_base(n: &Natural, a: &Natural) -> Result<MrOutcome> {
    if n.is_even() || *n < BigUint::from(3u8) {
        return Err(Error::InvalidModulus(n.clone()));
    }
    let n_minus_1 = n - 1u8;
    let split = lof_tpow(&n_minus_1)?;
    let mut b = a.modpow(&split.delta, n);
    let mut s = b.clone();
    for k in 1..=split.t {
        s = (&b * &b) % n;
        if s.is_one() && !b.is_one() && b != n_minus_1 {
            return Ok(MrOutcome { kind: Some(MrKind::NontrivialRoot(b)) });
        }
        if k < split.t {
            b = s.clone();
        }
    }
    if !s.is_one() {
        return Ok(MrOutcome { kind: Some(MrKind::FermatViolation) });
    }
    Ok(MrOutcome { kind: None })
}

/// Result of stepping through primes looking for a non-residue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QnrFound {
    /// `true` when `jacobi(p, n) = 0`, i.e. `p` divides `n`.
    pub found_factor: bool,
    pub p: Natural,
    pub iterations: u64,
}

/// Steps `p` through `3, 5, 7, ...` for at most `iter_limit - 1` rounds,
/// stopping at the first `p` with `jacobi(p, n) != 1`.
pub fn find_qnr(n: &Natural, iter_limit: u64) -> Result<QnrFound> {
    let mut p = BigUint::from(2u8);
    let mut i = 1;
    while i < iter_limit {
        p = next_prime(&p);
        match jacobi_nat(&p, n)? {
            0 => return Ok(QnrFound { found_factor: true, p, iterations: i }),
            -1 => return Ok(QnrFound { found_factor: false, p, iterations: i }),
            _ => {}
        }
        i += 1;
    }
    Err(Error::QnrSearchExhausted { limit: iter_limit })
}

/// Four-way result of the QNR search interleaved with Miller-Rabin rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QnrMrCode {
    /// Code 0: `value` is a non-residue.
    Qnr,
    /// Code 1: `jacobi(value, n) = 0`.
    JacobiZero,
    /// Code 2: `value` is a nontrivial square root of 1, found with `base`.
    NontrivialRoot { base: Natural },
    /// Code 3: `value` is a Fermat witness.
    FermatWitness,
}

impl QnrMrCode {
    pub fn code(&self) -> u8 {
        match self {
            Self::Qnr => 0,
            Self::JacobiZero => 1,
            Self::NontrivialRoot { .. } => 2,
            Self::FermatWitness => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QnrMrFound {
    pub code: QnrMrCode,
    pub value: Natural,
    pub iterations: u64,
}

pub fn find_qnr_with_mr(n: &Natural, iter_limit: u64) -> Result<QnrMrFound> {
    let mut p = BigUint::from(2u8);
    let mut i = 1;
    while i < iter_limit {
        p = next_prime(&p);
        match jacobi_nat(&p, n)? {
            0 => return Ok(QnrMrFound { code: QnrMrCode::JacobiZero, value: p, iterations: i }),
            -1 => return Ok(QnrMrFound { code: QnrMrCode::Qnr, value: p, iterations: i }),
            _ => match miller_rabin_base(n, &p)?.kind {
                Some(MrKind::NontrivialRoot(root)) => {
                    return Ok(QnrMrFound {
                        code: QnrMrCode::NontrivialRoot { base: p },
                        value: root,
                        iterations: i,
                    })
                }
                Some(MrKind::FermatViolation) => {
                    return Ok(QnrMrFound { code: QnrMrCode::FermatWitness, value: p, iterations: i })
                }
                None => {}
            },
        }
        i += 1;
    }
    Err(Error::QnrOrWitnessSearchExhausted { limit: iter_limit })
}

/// Screens inputs the tests do not cover: 0, 1, 2, 3 and even numbers.
fn degenerate(n: &Natural) -> Option<Verdict> {
    match n.to_u64() {
        Some(0 | 1) => Some(Verdict::bare(n, Outcome::NotApplicable)),
        Some(2 | 3) => Some(Verdict::prime(n, PrimeBasis::SmallPrime, QnrSearch::default())),
        _ if n.is_even() => Some(Verdict::composite(n, Mechanism::Even, QnrSearch::default())),
        _ => None,
    }
}

/// Euler criterion then binomial congruence for an explicit non-residue.
fn finish_with_qnr(n: &Natural, q: Natural, search: QnrSearch) -> Result<Verdict> {
    let q_signed = BigInt::from(q.clone());
    let e = ecc(&q_signed, n)?;
    if !e.is_zero() {
        return Ok(Verdict::composite(n, Mechanism::EulerWitness { q, ecc: e.value }, search));
    }
    let b = bcc(&q_signed, n)?;
    if !b.is_zero() {
        return Ok(Verdict::composite(n, Mechanism::BinomialWitness { q, a: b.a, b: b.b }, search));
    }
    Ok(Verdict::prime(n, PrimeBasis::Pbpc { q }, search))
}

/// Which QNR search routine the explicit-QNR test uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QnrSearchKind {
    #[default]
    Plain,
    WithMillerRabin,
}

pub fn ppta_eqnr(n: &Natural) -> Result<Verdict> {
    ppta_eqnr_with(n, QnrSearchKind::Plain, &Options::default())
}

/// Explicit-QNR test: choose `q = 2` or `q = n - 2` from `n mod 8` when
/// possible, otherwise screen squares and search; then check Euler's
/// criterion and the binomial congruence.
pub fn ppta_eqnr_with(n: &Natural, search_kind: QnrSearchKind, opts: &Options) -> Result<Verdict> {
    if let Some(v) = degenerate(n) {
        return Ok(v);
    }
    let r8 = low_u64(n) & 7;
    if r8 == 3 || r8 == 5 {
        let search = QnrSearch { needed: false, iterations: 0, q: Some(BigUint::from(2u8)) };
        return finish_with_qnr(n, BigUint::from(2u8), search);
    }
    if r8 == 7 {
        let q = n - 2u8;
        let search = QnrSearch { needed: false, iterations: 0, q: Some(q.clone()) };
        return finish_with_qnr(n, q, search);
    }
    if let Some(root) = perfect_square_root(n) {
        let search = QnrSearch { needed: true, iterations: 0, q: None };
        return Ok(Verdict::composite(n, Mechanism::PerfectSquare { root }, search));
    }
    let limit = opts.qnr_iter_limit(n);
    match search_kind {
        QnrSearchKind::Plain => {
            let found = find_qnr(n, limit)?;
            if found.found_factor {
                let search = QnrSearch { needed: true, iterations: found.iterations, q: None };
                return Ok(Verdict::composite(n, Mechanism::JacobiZeroFactor { base: found.p }, search));
            }
            let search = QnrSearch { needed: true, iterations: found.iterations, q: Some(found.p.clone()) };
            finish_with_qnr(n, found.p, search)
        }
        QnrSearchKind::WithMillerRabin => {
            let found = find_qnr_with_mr(n, limit)?;
            let mut search = QnrSearch { needed: true, iterations: found.iterations, q: None };
            let mechanism = match found.code {
                QnrMrCode::Qnr => {
                    search.q = Some(found.value.clone());
                    return finish_with_qnr(n, found.value, search);
                }
                QnrMrCode::JacobiZero => Mechanism::JacobiZeroFactor { base: found.value },
                QnrMrCode::NontrivialRoot { base } => Mechanism::MrNontrivialRoot { base, root: found.value },
                QnrMrCode::FermatWitness => Mechanism::FermatWitness { base: found.value },
            };
            Ok(Verdict::composite(n, mechanism, search))
        }
    }
}

/// How the implicit-non-residue test treats the canonical parameter path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InrMode {
    /// All four canonical-polynomial conditions.
    #[default]
    Pgpc,
    /// Only the binomial congruence modulo `Psi_m`.
    Fgpc,
}

pub fn ppta_inr(n: &Natural, mode: InrMode) -> Result<Verdict> {
    if let Some(v) = degenerate(n) {
        return Ok(v);
    }
    let r24 = (n % 24u8).to_u64().expect("residue below 24");
    if r24 != 1 {
        if r24 % 3 == 0 {
            return Ok(Verdict::composite(
                n,
                Mechanism::TrivialFactor { p: BigUint::from(3u8) },
                QnrSearch::default(),
            ));
        }
        let q = match r24 % 8 {
            3 | 5 => BigUint::from(2u8),
            7 => n - 2u8,
            _ => BigUint::from(3u8),
        };
        let search = QnrSearch { needed: false, iterations: 0, q: Some(q.clone()) };
        return finish_with_qnr(n, q, search);
    }

    let found = find_qnr_or_m(n)?;
    let mut search = QnrSearch { needed: true, iterations: found.iterations, q: None };
    match found.result {
        FindResult::Square(root) => Ok(Verdict::composite(n, Mechanism::PerfectSquare { root }, search)),
        FindResult::Divisor(p) => Ok(Verdict::composite(n, Mechanism::TrivialFactor { p }, search)),
        FindResult::Qnr(p) => {
            let q = BigUint::from(p);
            search.q = Some(q.clone());
            finish_with_qnr(n, q, search)
        }
        FindResult::Param(m) => {
            let params = CanonicalParams::cached(m)?;
            match mode {
                InrMode::Pgpc => {
                    let report = pgpc_check(n, &params)?;
                    if report.all_hold() {
                        Ok(Verdict::prime(n, PrimeBasis::Pgpc { m }, search))
                    } else {
                        let mechanism = Mechanism::PgpcViolation { report: Box::new(report) };
                        Ok(Verdict::composite(n, mechanism, search))
                    }
                }
                InrMode::Fgpc => {
                    let (ok, remainder) = fgpc_check(n, &params)?;
                    if ok {
                        Ok(Verdict::prime(n, PrimeBasis::Fgpc { m }, search))
                    } else {
                        let mechanism = Mechanism::PolyBinomialWitness { m, remainder };
                        Ok(Verdict::composite(n, mechanism, search))
                    }
                }
            }
        }
    }
}

/// Miller-Rabin hybrid: random bases until one is a non-residue (then the
/// explicit-QNR checks decide) or exposes `n` directly.
pub fn enhanced_mr(n: &Natural, max_random_iters: u64, rng_seed: u64) -> Result<Verdict> {
    if let Some(v) = degenerate(n) {
        return Ok(v);
    }
    let r24 = (n % 24u8).to_u64().expect("residue below 24");
    if r24 != 1 {
        if num_integer::gcd(r24, 6) > 1 {
            return Ok(Verdict::composite(
                n,
                Mechanism::TrivialFactor { p: BigUint::from(3u8) },
                QnrSearch::default(),
            ));
        }
        let q = match r24 % 8 {
            3 | 5 => BigUint::from(2u8),
            7 => n - 2u8,
            _ => BigUint::from(3u8),
        };
        let search = QnrSearch { needed: false, iterations: 0, q: Some(q.clone()) };
        return finish_with_qnr(n, q, search);
    }

    if let Some(root) = perfect_square_root(n) {
        let search = QnrSearch { needed: true, iterations: 0, q: None };
        return Ok(Verdict::composite(n, Mechanism::PerfectSquare { root }, search));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let lo = BigUint::from(5u8);
    // Inclusive upper bound n - 5.
    let hi = n - 4u8;
    for i in 1..=max_random_iters {
        let a = rng.gen_biguint_range(&lo, &hi);
        let mut search = QnrSearch { needed: true, iterations: i, q: None };
        match jacobi_nat(&a, n)? {
            0 => return Ok(Verdict::composite(n, Mechanism::JacobiZeroFactor { base: a }, search)),
            -1 => {
                search.q = Some(a.clone());
                return finish_with_qnr(n, a, search);
            }
            _ => match miller_rabin_base(n, &a)?.kind {
                Some(MrKind::NontrivialRoot(root)) => {
                    return Ok(Verdict::composite(n, Mechanism::MrNontrivialRoot { base: a, root }, search))
                }
                Some(MrKind::FermatViolation) => {
                    return Ok(Verdict::composite(n, Mechanism::FermatWitness { base: a }, search))
                }
                None => {}
            },
        }
    }
    let mut v = Verdict::bare(n, Outcome::Inconclusive);
    v.qnr_search = QnrSearch { needed: true, iterations: max_random_iters, q: None };
    Ok(v)
}

/// Algorithm selector used by the batch harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Eqnr,
    EqnrWithMr,
    Inr(InrMode),
    EnhancedMr { max_random_iters: u64, seed: u64 },
}

impl Algorithm {
    pub fn run(&self, n: &Natural, opts: &Options) -> Result<Verdict> {
        match *self {
            Self::Eqnr => ppta_eqnr_with(n, QnrSearchKind::Plain, opts),
            Self::EqnrWithMr => ppta_eqnr_with(n, QnrSearchKind::WithMillerRabin, opts),
            Self::Inr(mode) => ppta_inr(n, mode),
            Self::EnhancedMr { max_random_iters, seed } => enhanced_mr(n, max_random_iters, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Eqnr => "eqnr",
            Self::EqnrWithMr => "eqnr-mr",
            Self::Inr(InrMode::Pgpc) => "inr-pgpc",
            Self::Inr(InrMode::Fgpc) => "inr-fgpc",
            Self::EnhancedMr { .. } => "mr-hybrid",
        }
    }
}

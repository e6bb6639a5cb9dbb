//! Dataset ingestion, batch runs with run-log style statistics, and
//! brute-force oracles.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{Algorithm, Mechanism, Options, Outcome, Verdict};
use crate::ntcore::is_prime_u64;
use crate::{Error, Natural, Result};

/// Largest limit accepted by [`generate_carmichaels`].
pub const CARMICHAEL_LIMIT_MAX: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub numbers: Vec<Natural>,
    pub source: String,
}

impl Dataset {
    pub fn new(numbers: Vec<Natural>, source: impl Into<String>) -> Self {
        Self { numbers, source: source.into() }
    }

    pub fn len(&self) -> usize {
        self.numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numbers.is_empty()
    }
}

/// Whitespace-separated decimal integers; `#` starts a comment line.
pub fn parse_dataset(text: &str, source: impl Into<String>) -> Result<Dataset> {
    let mut numbers = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let value = token
                .parse::<BigUint>()
                .ok()
                .filter(|_| token.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| Error::Parse { line: i + 1, token: token.to_string() })?;
            numbers.push(value);
        }
    }
    Ok(Dataset::new(numbers, source))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let text = std::fs::read_to_string(&path)?;
    parse_dataset(&text, path.display().to_string())
}

/// Per-mechanism tallies for composites, plus the two buckets that keep
/// `sum + primes_found == total`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ResolvedBy {
    pub perfect_square: u64,
    pub js_zero_factor: u64,
    pub euler: u64,
    pub bcc: u64,
    pub trivial_factor: u64,
    pub pgpc: u64,
    pub miller_rabin: u64,
    /// Not-applicable and inconclusive verdicts, and per-number errors.
    pub unresolved: u64,
}

impl ResolvedBy {
    pub fn sum(&self) -> u64 {
        self.perfect_square
            + self.js_zero_factor
            + self.euler
            + self.bcc
            + self.trivial_factor
            + self.pgpc
            + self.miller_rabin
            + self.unresolved
    }

    fn merge(&mut self, o: &Self) {
        self.perfect_square += o.perfect_square;
        self.js_zero_factor += o.js_zero_factor;
        self.euler += o.euler;
        self.bcc += o.bcc;
        self.trivial_factor += o.trivial_factor;
        self.pgpc += o.pgpc;
        self.miller_rabin += o.miller_rabin;
        self.unresolved += o.unresolved;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BatchStats {
    pub total: u64,
    pub primes_found: u64,
    pub composites: u64,
    pub needing_search: u64,
    pub sum_search_iters: u64,
    pub max_search_iters: u64,
    /// Smallest `n` attaining `max_search_iters`.
    #[serde(serialize_with = "opt_decimal")]
    pub argmax_n: Option<Natural>,
    pub resolved_by: ResolvedBy,
    #[serde(serialize_with = "decimal")]
    pub sum_of_q: Natural,
    pub q_cases: u64,
}

fn decimal<S: serde::Serializer>(v: &Natural, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn opt_decimal<S: serde::Serializer>(v: &Option<Natural>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

impl BatchStats {
    /// Folds one verdict into the counters.
    pub fn record(&mut self, v: &Verdict) {
        self.total += 1;
        let search = &v.qnr_search;
        if search.needed && search.iterations > 0 {
            self.needing_search += 1;
            self.sum_search_iters += search.iterations;
            self.note_iters(search.iterations, &v.n);
        }
        if let Some(q) = &search.q {
            self.q_cases += 1;
            self.sum_of_q += q;
        }
        let r = &mut self.resolved_by;
        match v.outcome {
            Outcome::Prime => self.primes_found += 1,
            Outcome::Composite => {
                self.composites += 1;
                match v.mechanism {
                    Some(Mechanism::PerfectSquare { .. }) => r.perfect_square += 1,
                    Some(Mechanism::JacobiZeroFactor { .. }) => r.js_zero_factor += 1,
                    Some(Mechanism::EulerWitness { .. }) => r.euler += 1,
                    Some(Mechanism::BinomialWitness { .. } | Mechanism::PolyBinomialWitness { .. }) => r.bcc += 1,
                    Some(Mechanism::Even | Mechanism::TrivialFactor { .. }) => r.trivial_factor += 1,
                    Some(Mechanism::PgpcViolation { .. }) => r.pgpc += 1,
                    Some(Mechanism::MrNontrivialRoot { .. } | Mechanism::FermatWitness { .. }) => {
                        r.miller_rabin += 1
                    }
                    None => r.unresolved += 1,
                }
            }
            Outcome::NotApplicable | Outcome::Inconclusive => r.unresolved += 1,
        }
    }

    /// Counts a number whose run ended in an error.
    pub fn record_error(&mut self) {
        self.total += 1;
        self.resolved_by.unresolved += 1;
    }

    fn note_iters(&mut self, iters: u64, n: &Natural) {
        let better = iters > self.max_search_iters
            || (iters == self.max_search_iters && self.argmax_n.as_ref().is_none_or(|m| n < m));
        if better {
            self.max_search_iters = iters;
            self.argmax_n = Some(n.clone());
        }
    }

    /// Order-independent combination of two partial tallies.
    pub fn merge(&mut self, o: &Self) {
        self.total += o.total;
        self.primes_found += o.primes_found;
        self.composites += o.composites;
        self.needing_search += o.needing_search;
        self.sum_search_iters += o.sum_search_iters;
        if let Some(n) = &o.argmax_n {
            self.note_iters(o.max_search_iters, n);
        }
        self.resolved_by.merge(&o.resolved_by);
        self.sum_of_q += &o.sum_of_q;
        self.q_cases += o.q_cases;
    }

    pub fn avg_search_iters(&self) -> f64 {
        ratio(self.sum_search_iters, self.needing_search)
    }

    pub fn row(&self, index: u64) -> StatsRow {
        let c = self.composites;
        let r = &self.resolved_by;
        StatsRow {
            index,
            js0: r.js_zero_factor,
            js0_frac: ratio(r.js_zero_factor, c),
            ecc: r.euler,
            ecc_frac: ratio(r.euler, c),
            bcc: r.bcc,
            bcc_frac: ratio(r.bcc, c),
            search: self.needing_search,
            search_frac: ratio(self.needing_search, self.total),
            avg_iters: self.avg_search_iters(),
            max_iters: self.max_search_iters,
        }
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// One line of the periodic statistics stream.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsRow {
    pub index: u64,
    pub js0: u64,
    pub js0_frac: f64,
    pub ecc: u64,
    pub ecc_frac: f64,
    pub bcc: u64,
    pub bcc_frac: f64,
    pub search: u64,
    pub search_frac: f64,
    pub avg_iters: f64,
    pub max_iters: u64,
}

/// Four decimals with trailing zeros dropped, as in `4.362`.
fn short_decimal(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

impl fmt::Display for StatsRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} ({:.4}), {} ({:.4}), {} ({:.4}) | {} ({:.4}), {}, {}",
            self.index,
            self.js0,
            self.js0_frac,
            self.ecc,
            self.ecc_frac,
            self.bcc,
            self.bcc_frac,
            self.search,
            self.search_frac,
            short_decimal(self.avg_iters),
            self.max_iters
        )
    }
}

pub fn write_csv<W: Write>(rows: &[StatsRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "index", "js0", "js0_frac", "ecc", "ecc_frac", "bcc", "bcc_frac", "search", "search_frac", "avg_iters",
        "max_iters",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.js0.to_string(),
            format!("{:.4}", r.js0_frac),
            r.ecc.to_string(),
            format!("{:.4}", r.ecc_frac),
            r.bcc.to_string(),
            format!("{:.4}", r.bcc_frac),
            r.search.to_string(),
            format!("{:.4}", r.search_frac),
            short_decimal(r.avg_iters),
            r.max_iters.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchConfig {
    pub algorithm: Algorithm,
    /// Emit a row after every this many numbers; 0 means only the final row.
    pub print_every: u64,
    /// Worker threads; 1 runs on the calling thread.
    pub jobs: usize,
    pub options: Options,
}

/// A number whose run failed, with its 1-based position in the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub index: u64,
    pub n: Natural,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub stats: BatchStats,
    pub rows: Vec<StatsRow>,
    pub diagnostics: Vec<Diagnostic>,
}

const CHUNK: usize = 4096;

/// Runs `cfg.algorithm` over the dataset. Rows are handed to `on_row` in
/// index order, independent of `jobs`.
pub fn run_batch(ds: &Dataset, cfg: &BatchConfig, mut on_row: impl FnMut(&StatsRow)) -> Result<BatchReport> {
    let pool = if cfg.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.jobs)
                .build()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?,
        )
    } else {
        None
    };
    let run = |n: &Natural| cfg.algorithm.run(n, &cfg.options);

    let mut stats = BatchStats::default();
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let mut index = 0u64;
    for chunk in ds.numbers.chunks(CHUNK) {
        let results: Vec<Result<Verdict>> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().map(run).collect()),
            None => chunk.iter().map(run).collect(),
        };
        for (n, result) in chunk.iter().zip(results) {
            index += 1;
            match result {
                Ok(v) => stats.record(&v),
                Err(e) => {
                    stats.record_error();
                    diagnostics.push(Diagnostic { index, n: n.clone(), message: e.to_string() });
                }
            }
            if cfg.print_every > 0 && index % cfg.print_every == 0 {
                let row = stats.row(index);
                on_row(&row);
                rows.push(row);
            }
        }
    }
    if rows.last().is_none_or(|r| r.index != index) {
        let row = stats.row(index);
        on_row(&row);
        rows.push(row);
    }
    Ok(BatchReport { stats, rows, diagnostics })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialDivision {
    Zero,
    Unit,
    Prime,
    /// Carries the smallest prime factor.
    Composite(u64),
}

/// Ground truth by division up to `floor(sqrt(n))`, for `n < 2^64`.
pub fn trial_division(n: &Natural) -> Result<TrialDivision> {
    let v = n.to_u64().ok_or_else(|| Error::OracleRange(n.clone()))?;
    Ok(trial_division_u64(v))
}

pub fn trial_division_u64(v: u64) -> TrialDivision {
    match v {
        0 => return TrialDivision::Zero,
        1 => return TrialDivision::Unit,
        _ => {}
    }
    if v % 2 == 0 {
        return if v == 2 { TrialDivision::Prime } else { TrialDivision::Composite(2) };
    }
    let mut d = 3u64;
    while d <= v / d {
        if v % d == 0 {
            return TrialDivision::Composite(d);
        }
        d += 2;
    }
    TrialDivision::Prime
}

fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let m128 = u128::from(m);
    let mut base = u128::from(b % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Korselt check on a base-2 Fermat pseudoprime candidate.
fn is_carmichael(n: u64) -> bool {
    let mut rest = n;
    let mut factors = 0;
    let mut p = 3u64;
    while p <= rest / p {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 || (n - 1) % (p - 1) != 0 {
                return false;
            }
            factors += 1;
        }
        p += 2;
    }
    if rest > 1 {
        if (n - 1) % (rest - 1) != 0 {
            return false;
        }
        factors += 1;
    }
    factors >= 2
}

/// Every Carmichael number below `limit`, ascending.
pub fn generate_carmichaels(limit: u64) -> Result<Vec<u64>> {
    if limit > CARMICHAEL_LIMIT_MAX {
        return Err(Error::LimitTooLarge(limit));
    }
    // Carmichael numbers are odd and pass the base-2 Fermat test.
    let mut out: Vec<u64> = (1..limit / 2)
        .into_par_iter()
        .map(|h| 2 * h + 1)
        .filter(|&n| n < limit && pow_mod_u64(2, n - 1, n) == 1 && !is_prime_u64(n) && is_carmichael(n))
        .collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::InrMode;

    fn ds(values: &[u64]) -> Dataset {
        Dataset::new(values.iter().map(|&v| BigUint::from(v)).collect(), "inline")
    }

    fn cfg(algorithm: Algorithm, print_every: u64, jobs: usize) -> BatchConfig {
        BatchConfig { algorithm, print_every, jobs, options: Options::default() }
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_dataset("561\n1105\n1729\n", "t").unwrap().numbers, ds(&[561, 1105, 1729]).numbers);
        assert_eq!(parse_dataset("# header\n2047\n", "t").unwrap().numbers, ds(&[2047]).numbers);
        assert!(parse_dataset("", "t").unwrap().is_empty());
        assert!(matches!(parse_dataset("56a1", "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dataset("3 5\n\n7 +9\n", "t"), Err(Error::Parse { line: 3, ref token }) if token == "+9"));
        assert_eq!(parse_dataset("3 5\t7\n  # indented comment\n9", "t").unwrap().len(), 4);
    }

    #[test]
    fn row_format() {
        let row = StatsRow {
            index: 24668,
            js0: 8905,
            js0_frac: 8905.0 / 24668.0,
            ecc: 15575,
            ecc_frac: 15575.0 / 24668.0,
            bcc: 188,
            bcc_frac: 188.0 / 24668.0,
            search: 21726,
            search_frac: 21726.0 / 24668.0,
            avg_iters: 4.06221,
            max_iters: 17,
        };
        assert_eq!(row.to_string(), "24668 | 8905 (0.3610), 15575 (0.6314), 188 (0.0076) | 21726 (0.8807), 4.0622, 17");
        assert_eq!(short_decimal(4.36200001), "4.362");
        assert_eq!(short_decimal(0.0), "0");
        assert_eq!(short_decimal(3.0), "3");
    }

    #[test]
    fn small_carmichael_batch() {
        let report = run_batch(&ds(&[561, 1105, 1729]), &cfg(Algorithm::Eqnr, 0, 1), |_| {}).unwrap();
        assert_eq!(report.stats.total, 3);
        assert_eq!(report.stats.primes_found, 0);
        assert_eq!(report.stats.composites, 3);
        assert_eq!(report.rows.len(), 1);
        assert!(report.diagnostics.is_empty());
    }

    #[test]
    fn empty_batch_has_one_zero_row() {
        let mut seen = Vec::new();
        let report = run_batch(&ds(&[]), &cfg(Algorithm::Eqnr, 10, 1), |r| seen.push(r.clone())).unwrap();
        assert_eq!(report.stats, BatchStats::default());
        assert_eq!(seen.len(), 1);
        assert_eq!(seen[0].to_string(), "0 | 0 (0.0000), 0 (0.0000), 0 (0.0000) | 0 (0.0000), 0, 0");
    }

    #[test]
    fn rows_every_k_and_final() {
        let values: Vec<u64> = (3..100).step_by(2).collect();
        let report = run_batch(&ds(&values), &cfg(Algorithm::Eqnr, 10, 1), |_| {}).unwrap();
        let idx: Vec<u64> = report.rows.iter().map(|r| r.index).collect();
        assert_eq!(idx, vec![10, 20, 30, 40, 49]);
        let report = run_batch(&ds(&values[..40]), &cfg(Algorithm::Eqnr, 10, 1), |_| {}).unwrap();
        assert_eq!(report.rows.last().unwrap().index, 40);
        assert_eq!(report.rows.len(), 4);
    }

    #[test]
    fn stats_equal_fold_of_verdicts() {
        let values: Vec<u64> = (1..30_000).step_by(2).collect();
        for algorithm in [Algorithm::Eqnr, Algorithm::Inr(InrMode::Pgpc), Algorithm::Inr(InrMode::Fgpc)] {
            let report = run_batch(&ds(&values), &cfg(algorithm, 0, 1), |_| {}).unwrap();
            let s = &report.stats;
            assert_eq!(s.resolved_by.sum() + s.primes_found, s.total);

            let (mut primes, mut searched, mut iters, mut max) = (0, 0, 0, 0);
            for &v in &values {
                let verdict = algorithm.run(&BigUint::from(v), &Options::default()).unwrap();
                primes += u64::from(verdict.is_prime());
                if verdict.qnr_search.needed && verdict.qnr_search.iterations > 0 {
                    searched += 1;
                    iters += verdict.qnr_search.iterations;
                    max = max.max(verdict.qnr_search.iterations);
                }
            }
            let expected_primes = values.iter().filter(|&&v| is_prime_u64(v)).count() as u64;
            assert_eq!((s.primes_found, primes), (expected_primes, expected_primes));
            assert_eq!((s.needing_search, s.sum_search_iters, s.max_search_iters), (searched, iters, max));
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let values: Vec<u64> = (1..40_000u64).rev().filter(|v| v % 2 == 1).collect();
        let a = run_batch(&ds(&values), &cfg(Algorithm::Eqnr, 1000, 1), |_| {}).unwrap();
        let b = run_batch(&ds(&values), &cfg(Algorithm::Eqnr, 1000, 4), |_| {}).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn merge_is_order_independent() {
        let values: Vec<u64> = (1..5000).step_by(2).collect();
        let opts = Options::default();
        let parts: Vec<BatchStats> = values
            .chunks(333)
            .map(|c| {
                let mut s = BatchStats::default();
                for &v in c {
                    s.record(&Algorithm::Eqnr.run(&BigUint::from(v), &opts).unwrap());
                }
                s
            })
            .collect();
        let mut forward = BatchStats::default();
        parts.iter().for_each(|p| forward.merge(p));
        let mut backward = BatchStats::default();
        parts.iter().rev().for_each(|p| backward.merge(p));
        assert_eq!(forward, backward);
        let whole = run_batch(&ds(&values), &cfg(Algorithm::Eqnr, 0, 1), |_| {}).unwrap().stats;
        assert_eq!(forward, whole);
    }

    #[test]
    fn argmax_prefers_smallest_n() {
        let mut s = BatchStats::default();
        s.note_iters(5, &BigUint::from(99u8));
        s.note_iters(5, &BigUint::from(77u8));
        s.note_iters(4, &BigUint::from(3u8));
        assert_eq!((s.max_search_iters, s.argmax_n.clone()), (5, Some(BigUint::from(77u8))));
    }

    #[test]
    fn csv_output() {
        let report = run_batch(&ds(&[561, 1105, 1729]), &cfg(Algorithm::Eqnr, 0, 1), |_| {}).unwrap();
        let mut buf = Vec::new();
        write_csv(&report.rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "index,js0,js0_frac,ecc,ecc_frac,bcc,bcc_frac,search,search_frac,avg_iters,max_iters"
        );
        assert!(lines.next().unwrap().starts_with("3,"));
    }

    #[test]
    fn trial_division_examples() {
        assert_eq!(trial_division(&BigUint::from(2047u32)).unwrap(), TrialDivision::Composite(23));
        assert_eq!(trial_division(&BigUint::from(569u32)).unwrap(), TrialDivision::Prime);
        assert_eq!(trial_division(&BigUint::from(1u32)).unwrap(), TrialDivision::Unit);
        assert_eq!(trial_division_u64(2), TrialDivision::Prime);
        assert_eq!(trial_division_u64(49), TrialDivision::Composite(7));
        let big: BigUint = "97723892848682923994567734100095132801".parse().unwrap();
        assert!(matches!(trial_division(&big), Err(Error::OracleRange(_))));
    }

    #[test]
    fn trial_division_agrees_with_mr() {
        for v in 0..100_000u64 {
            assert_eq!(trial_division_u64(v) == TrialDivision::Prime, is_prime_u64(v), "{v}");
        }
    }

    #[test]
    fn carmichael_examples() {
        assert_eq!(generate_carmichaels(2000).unwrap(), vec![561, 1105, 1729]);
        assert!(generate_carmichaels(561).unwrap().is_empty());
        let c = generate_carmichaels(100_000).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!((c[0], *c.last().unwrap()), (561, 75361));
        assert!(matches!(generate_carmichaels(CARMICHAEL_LIMIT_MAX + 1), Err(Error::LimitTooLarge(_))));
    }

    #[test]
    fn carmichaels_match_brute_force_korselt() {
        let fast = generate_carmichaels(20_000).unwrap();
        let slow: Vec<u64> = (3..20_000u64)
            .filter(|&n| {
                let mut rest = n;
                let mut k = 0;
                let mut p = 2;
                while rest > 1 {
                    if rest % p == 0 {
                        rest /= p;
                        if rest % p == 0 || (n - 1) % (p - 1) != 0 {
                            return false;
                        }
                        k += 1;
                    }
                    p += 1;
                }
                k >= 2
            })
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn carmichaels_are_composite_for_every_algorithm() {
        let opts = Options::default();
        for c in generate_carmichaels(1_000_000).unwrap() {
            let n = BigUint::from(c);
            for algorithm in [Algorithm::Eqnr, Algorithm::Inr(InrMode::Pgpc), Algorithm::Inr(InrMode::Fgpc)] {
                assert_eq!(algorithm.run(&n, &opts).unwrap().outcome, Outcome::Composite, "{c}");
            }
        }
    }
}

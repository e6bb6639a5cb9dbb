use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use primecert::algorithms::{Algorithm, InrMode, Mechanism, Options, Outcome, PrimeBasis, Verdict};
use primecert::canonical::{find_qnr_or_m, CanonicalParams, FindResult};
use primecert::certificate::{verify_certificate, Certificate};
use primecert::expr::parse_natural;
use primecert::harness::{load_dataset, run_batch, write_csv, BatchConfig};
use primecert::Error;

const EXIT_PRIME: u8 = 0;
const EXIT_COMPOSITE: u8 = 1;
const EXIT_UNDECIDED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_SOFTWARE: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "primecert", version, about = "Deterministic primality tests with checkable certificates")]
struct Cli {
    /// Print extra diagnostics to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide primality of one number (decimal or an expression like 2^127-1).
    Test {
        n: String,
        #[arg(long, value_enum, default_value_t = AlgoArg::Inr)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Pgpc)]
        mode: ModeArg,
        /// Emit the JSON certificate instead of a one-line verdict.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        hybrid: HybridArgs,
    },
    /// Run an algorithm over a dataset file and print run-log style rows.
    Batch {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = AlgoArg::Eqnr)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Pgpc)]
        mode: ModeArg,
        /// Emit a row after every K numbers (0: final row only).
        #[arg(long, default_value_t = 0)]
        print_every: u64,
        /// Also write the rows as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        #[command(flatten)]
        hybrid: HybridArgs,
    },
    /// Print the canonical polynomials for a prime power m >= 3.
    Poly { m: u64 },
    /// Run the QNR-or-parameter search for n = 1 (mod 24).
    FindM { n: String },
    /// Time several algorithms over a dataset.
    Bench {
        file: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [BenchAlgo::Eqnr, BenchAlgo::InrPgpc, BenchAlgo::InrFgpc, BenchAlgo::MrHybrid])]
        algos: Vec<BenchAlgo>,
        #[command(flatten)]
        hybrid: HybridArgs,
    },
    /// Re-check a JSON certificate produced by `test --json`.
    Verify {
        /// Certificate file, or `-` for standard input.
        file: PathBuf,
    },
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct HybridArgs {
    /// Random draws allowed to the Miller-Rabin hybrid.
    #[arg(long, default_value_t = 100)]
    max_random_iters: u64,
    /// Seed for the Miller-Rabin hybrid.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum AlgoArg {
    Eqnr,
    Inr,
    MrHybrid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Pgpc,
    Fgpc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BenchAlgo {
    Eqnr,
    EqnrMr,
    InrPgpc,
    InrFgpc,
    MrHybrid,
}

fn algorithm(algo: AlgoArg, mode: ModeArg, hybrid: HybridArgs) -> Algorithm {
    match algo {
        AlgoArg::Eqnr => Algorithm::Eqnr,
        AlgoArg::Inr => Algorithm::Inr(match mode {
            ModeArg::Pgpc => InrMode::Pgpc,
            ModeArg::Fgpc => InrMode::Fgpc,
        }),
        AlgoArg::MrHybrid => Algorithm::EnhancedMr { max_random_iters: hybrid.max_random_iters, seed: hybrid.seed },
    }
}

fn bench_algorithm(a: BenchAlgo, hybrid: HybridArgs) -> Algorithm {
    match a {
        BenchAlgo::Eqnr => Algorithm::Eqnr,
        BenchAlgo::EqnrMr => Algorithm::EqnrWithMr,
        BenchAlgo::InrPgpc => Algorithm::Inr(InrMode::Pgpc),
        BenchAlgo::InrFgpc => Algorithm::Inr(InrMode::Fgpc),
        BenchAlgo::MrHybrid => Algorithm::EnhancedMr { max_random_iters: hybrid.max_random_iters, seed: hybrid.seed },
    }
}

/// An error paired with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Expression { .. } => EXIT_USAGE,
            Error::Parse { .. } | Error::Json(_) | Error::Certificate(_) => EXIT_DATA,
            Error::Io(_) => EXIT_IO,
            Error::NotPrimePower(_) | Error::NotOneMod24(_) | Error::LimitTooLarge(_) => EXIT_USAGE,
            _ => EXIT_SOFTWARE,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Error::from(e).into()
    }
}

fn parse_input(s: &str) -> Result<BigUint, Failure> {
    parse_natural(s).map_err(Failure::from)
}

fn describe(v: &Verdict) -> String {
    match v.outcome {
        Outcome::Prime => match &v.prime_basis {
            Some(PrimeBasis::SmallPrime) | None => "Prime (small prime)".to_string(),
            Some(PrimeBasis::Pbpc { q }) => format!("Prime (PBPC, q={q})"),
            Some(PrimeBasis::Pgpc { m }) => format!("Prime (PGPC, m={m})"),
            Some(PrimeBasis::Fgpc { m }) => format!("Prime (FGPC, m={m})"),
        },
        Outcome::Composite => match &v.mechanism {
            Some(Mechanism::Even) => "Composite (Even)".to_string(),
            Some(Mechanism::TrivialFactor { p }) => format!("Composite (TrivialFactor p={p})"),
            Some(Mechanism::JacobiZeroFactor { base }) => {
                format!("Composite (JacobiZeroFactor p={base}): jacobi({base}, n) = 0")
            }
            Some(Mechanism::PerfectSquare { root }) => format!("Composite (PerfectSquare): n = {root}^2"),
            Some(Mechanism::EulerWitness { q, ecc }) => format!("Composite (EulerWitness q={q}): ECC = {ecc}"),
            Some(Mechanism::BinomialWitness { q, a, b }) => {
                format!("Composite (BinomialWitness q={q}): BCC = {a} + {b}*sqrt({q})")
            }
            Some(Mechanism::PolyBinomialWitness { m, remainder }) => {
                format!("Composite (BinomialWitness Psi_{m}): remainder = {remainder}")
            }
            Some(Mechanism::MrNontrivialRoot { base, root }) => {
                format!("Composite (MrNontrivialRoot a={base}): {root}^2 = 1")
            }
            Some(Mechanism::FermatWitness { base }) => format!("Composite (FermatWitness a={base})"),
            Some(Mechanism::PgpcViolation { report }) => {
                let failed: Vec<String> = report.failed().iter().map(u8::to_string).collect();
                format!("Composite (PgpcViolation m={}): conditions {} fail", report.m, failed.join(","))
            }
            None => "Composite".to_string(),
        },
        Outcome::NotApplicable => "Not applicable (neither prime nor composite)".to_string(),
        Outcome::Inconclusive => "Inconclusive (random draws exhausted)".to_string(),
    }
}

fn outcome_code(o: Outcome) -> u8 {
    match o {
        Outcome::Prime => EXIT_PRIME,
        Outcome::Composite => EXIT_COMPOSITE,
        Outcome::NotApplicable | Outcome::Inconclusive => EXIT_UNDECIDED,
    }
}

fn cmd_test(n: &str, algo: Algorithm, json: bool, verbose: u8) -> Result<u8, Failure> {
    let n = parse_input(n)?;
    let opts = Options::from_env();
    let start = Instant::now();
    let v = algo.run(&n, &opts)?;
    let elapsed = start.elapsed();
    let mut out = io::stdout().lock();
    if json {
        let cert = Certificate::from_verdict(&v, algo.name(), Some(elapsed));
        writeln!(out, "{}", cert.to_json()?)?;
    } else {
        writeln!(out, "{}", describe(&v))?;
        if verbose > 0 && v.qnr_search.needed {
            eprintln!("qnr search: {} iterations", v.qnr_search.iterations);
        }
    }
    Ok(outcome_code(v.outcome))
}

fn cmd_batch(
    file: &PathBuf,
    algo: Algorithm,
    print_every: u64,
    out: Option<&PathBuf>,
    jobs: u16,
    verbose: u8,
) -> Result<u8, Failure> {
    let ds = load_dataset(file)?;
    let cfg = BatchConfig { algorithm: algo, print_every, jobs: usize::from(jobs), options: Options::from_env() };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let mut write_err = None;
    let report = run_batch(&ds, &cfg, |row| {
        if write_err.is_none() {
            if let Err(e) = writeln!(lock, "{row}") {
                write_err = Some(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    for d in &report.diagnostics {
        eprintln!("index {}: n = {}: {}", d.index, d.n, d.message);
    }
    let s = &report.stats;
    if verbose > 0 {
        eprintln!(
            "total = {}, primes = {}, composites = {}, max q iters = {}{}",
            s.total,
            s.primes_found,
            s.composites,
            s.max_search_iters,
            s.argmax_n.as_ref().map(|n| format!(" at n = {n}")).unwrap_or_default()
        );
    }
    if let Some(path) = out {
        write_csv(&report.rows, BufWriter::new(File::create(path)?))?;
    }
    Ok(0)
}

fn cmd_poly(m: u64) -> Result<u8, Failure> {
    let params = CanonicalParams::new(m)?;
    let mut out = io::stdout().lock();
    writeln!(out, "m = {} (p = {}, k = {}, d = {})", params.m, params.p_m, params.k, params.d)?;
    writeln!(out, "Phi:     {}", params.cyclotomic().render("x"))?;
    writeln!(out, "Upsilon: {}", params.upsilon.render("t"))?;
    writeln!(out, "Psi:     {}", params.psi.render("u"))?;
    Ok(0)
}

fn cmd_find_m(n: &str) -> Result<u8, Failure> {
    let n = parse_input(n)?;
    let found = find_qnr_or_m(&n)?;
    let it = found.iterations;
    let line = match found.result {
        FindResult::Param(m) => format!("m = {m} ({it} iterations)"),
        FindResult::Qnr(q) => format!("qnr = {q} ({it} iterations)"),
        FindResult::Divisor(p) => format!("divisor = {p} ({it} iterations)"),
        FindResult::Square(r) => format!("perfect square of {r}"),
    };
    writeln!(io::stdout().lock(), "{line}")?;
    Ok(0)
}

fn cmd_bench(file: &PathBuf, algos: &[BenchAlgo], hybrid: HybridArgs) -> Result<u8, Failure> {
    let ds = load_dataset(file)?;
    let opts = Options::from_env();
    let mut out = io::stdout().lock();
    writeln!(out, "{:<10} {:>8} {:>8} {:>10} {:>8} {:>12} {:>12}", "algo", "count", "primes", "composites", "errors", "total_ms", "mean_us")?;
    if ds.is_empty() {
        return Ok(0);
    }
    for &a in algos {
        let algo = bench_algorithm(a, hybrid);
        let (mut primes, mut composites, mut errors) = (0u64, 0u64, 0u64);
        let start = Instant::now();
        for n in &ds.numbers {
            match algo.run(n, &opts) {
                Ok(v) if v.outcome == Outcome::Prime => primes += 1,
                Ok(v) if v.outcome == Outcome::Composite => composites += 1,
                Ok(_) => {}
                Err(_) => errors += 1,
            }
        }
        let elapsed = start.elapsed();
        let mean = elapsed.as_secs_f64() * 1e6 / ds.len() as f64;
        writeln!(
            out,
            "{:<10} {:>8} {:>8} {:>10} {:>8} {:>12.3} {:>12.3}",
            algo.name(),
            ds.len(),
            primes,
            composites,
            errors,
            elapsed.as_secs_f64() * 1e3,
            mean
        )?;
    }
    Ok(0)
}

fn cmd_verify(file: &PathBuf) -> Result<u8, Failure> {
    let text = if file.as_os_str() == "-" {
        io::read_to_string(io::stdin())?
    } else {
        std::fs::read_to_string(file)?
    };
    let cert = Certificate::from_json(&text)?;
    verify_certificate(&cert)?;
    writeln!(io::stdout().lock(), "certificate for {} verified", cert.n)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Test { n, algo, mode, json, hybrid } => cmd_test(&n, algorithm(algo, mode, hybrid), json, cli.verbose),
        Command::Batch { file, algo, mode, print_every, out, jobs, hybrid } => {
            cmd_batch(&file, algorithm(algo, mode, hybrid), print_every, out.as_ref(), jobs, cli.verbose)
        }
        Command::Poly { m } => cmd_poly(m),
        Command::FindM { n } => cmd_find_m(&n),
        Command::Bench { file, algos, hybrid } => cmd_bench(&file, &algos, hybrid),
        Command::Verify { file } => cmd_verify(&file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

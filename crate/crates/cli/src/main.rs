mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gauss_chaos::cf::lemmas::{cylinder_battery, quasi_mult_battery, WordOdometer};
use gauss_chaos::cf::{cf_expand_rational, convergents, cylinder, drop_digit_ratio, gauss_measure};
use gauss_chaos::density::{
    bounded_point_in_interval, coverage_scan, digit_one_fraction, invariance_check, read_ndjson,
    sample_batch, word_occurs, write_ndjson, DEFAULT_BITS, DEFAULT_MAX_WORD_LEN,
};
use gauss_chaos::dimension::{dim_series, jarnik_bracket, to_csv, SetKind, DEFAULT_TOL};
use gauss_chaos::rational::{int, parse_rational, to_pq, Interval};
use gauss_chaos::scramble::{
    gap_lemma_battery, holder_check, holder_k, stripped_is_longer, verify_scrambled_pair,
    ScrambleConfig, DEFAULT_COUNT, DEFAULT_HORIZON, DEFAULT_J_MAX,
};
use gauss_chaos::symbolic::{
    check_schedule_references, delta_inverse_prefix, delta_map, schedule_bounds, SeedSpec,
};
use gauss_chaos::{Digit, Error, Rational, Word};
use num_bigint::BigUint;
use serde_json::{json, Value};

use config::{Format, Overrides, RunConfig, THREADS_ENV};

#[derive(Parser)]
#[command(name = "gauss-chaos", version, about = "Exact continued-fraction and Gauss-map chaos toolkit")]
struct Cli {
    /// key=value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// worker threads (overrides the config file and GAUSS_CHAOS_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// decimal digits for logarithms
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// largest cover or enumeration allowed
    #[arg(long, global = true)]
    max_cover: Option<u128>,
    /// enclosure depth cap for scramble witnesses
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// root random seed
    #[arg(long = "rng-seed", global = true)]
    rng_seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// run the exhaustive small-range lemma suite
    #[arg(long)]
    self_check: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Continued-fraction digits of a rational in [0, 1)
    Expand {
        #[arg(long)]
        x: String,
    },
    /// Endpoints, length and convergents of a cylinder
    Cylinder {
        #[arg(long)]
        word: Word,
    },
    /// Prefix of the Δ_N image of a seed, or the inverse of a prefix
    Construct {
        #[arg(long = "n")]
        n_alpha: Digit,
        /// seed stream "preamble;period", e.g. "2,3;1,2"
        #[arg(long, required_unless_present = "invert")]
        seed: Option<String>,
        #[arg(long, default_value_t = 30)]
        length: usize,
        /// recover the seed prefix from a Δ_N prefix
        #[arg(long, conflicts_with = "seed")]
        invert: Option<Word>,
    },
    /// Scrambled-pair witnesses for two seed specs
    Scramble(ScrambleArgs),
    /// Pressure-root dimension series as CSV
    Dim {
        #[arg(long = "set")]
        set_kind: SetKind,
        #[arg(long = "n")]
        n_alpha: Digit,
        #[arg(long)]
        depth: u64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Digit statistics of sampled and constructed points
    Density {
        #[command(subcommand)]
        command: DensityCommand,
    },
    /// Brute-force lemma checks over small ranges
    LemmaCheck {
        #[command(subcommand)]
        command: LemmaCommand,
    },
}

#[derive(Args)]
struct ScrambleArgs {
    #[arg(long = "n-a")]
    n_a: Digit,
    #[arg(long = "seed-a")]
    seed_a: String,
    #[arg(long = "n-b")]
    n_b: Digit,
    #[arg(long = "seed-b")]
    seed_b: String,
    #[arg(long, default_value_t = DEFAULT_COUNT)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    j_max: u64,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: u64,
    /// separation threshold "p/q"
    #[arg(long)]
    delta: Option<String>,
}

#[derive(Subcommand)]
enum DensityCommand {
    /// Certified digits of uniform dyadic samples
    Sample {
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 100)]
        digits: usize,
        #[arg(long, default_value_t = DEFAULT_BITS)]
        bits: u32,
        /// fail unless at least this fraction contains the digit 1
        #[arg(long)]
        min_fraction: Option<f64>,
        /// write the samples as newline-delimited JSON
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Re-derive every record of a sample corpus
    Replay {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Gauss-measure invariance over the first K inverse branches
    Invariance {
        /// e.g. "[0,1/2]"; bare "a,b" is closed
        #[arg(long)]
        interval: String,
        #[arg(long, default_value_t = 1000)]
        branches: u64,
    },
    /// Missing words in a digit sequence
    Scan {
        #[arg(long, required_unless_present = "corpus")]
        digits: Option<Word>,
        #[arg(long, conflicts_with = "digits")]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[arg(long, default_value_t = 3)]
        m_max: Digit,
        /// report the first occurrence of this word
        #[arg(long)]
        word: Option<Word>,
    },
    /// A bounded-type point inside an interval
    Bounded {
        /// e.g. "(1/3,1/2)"; bare "a,b" is open
        #[arg(long)]
        interval: String,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_WORD_LEN)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum LemmaCommand {
    /// |I(uv)| / (|I(u)||I(v)|) in [1/8, 4]
    QuasiMult {
        #[arg(long, default_value_t = 5)]
        max_digit: Digit,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// q_n(w) / q_{n-1}(w without a_k) in [(a_k+1)/2, a_k+1]
    DropRatio {
        #[arg(long, default_value_t = 8)]
        max_digit: Digit,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// q_n >= 2^{(n-1)/2}
    QGrowth {
        #[arg(long, default_value_t = 8)]
        max_digit: Digit,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// separation of E_N points in different cylinders
    Gap {
        #[arg(long = "n", default_value_t = 3)]
        n_alpha: Digit,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
    /// Hölder bound for the conjugacy on sampled pairs
    Holder {
        #[arg(long = "n", default_value_t = 2)]
        n_alpha: Digit,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// common-prefix depth; defaults to K(eps)
        #[arg(long)]
        depth: Option<u64>,
    },
    /// growth bounds for the R schedule
    Schedule {
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
}

/// A failed run: exit 1 for verification or budget failures, 2 for usage.
enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Domain(_) | Error::Precondition(_) | Error::IndexOutOfRange { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Run(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn pq_list(pairs: &[(BigUint, BigUint)]) -> Vec<String> {
    pairs
        .iter()
        .map(|(p, q)| to_pq(&Rational::new(p.clone().into(), q.clone().into())))
        .collect()
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json(v: &Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("json values serialize")));
}

fn to_json(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn parse_interval(text: &str, closed_default: bool) -> Result<Interval, Failure> {
    let t = text.trim();
    let (lo_closed, body) = match t.chars().next() {
        Some('[') => (true, &t[1..]),
        Some('(') => (false, &t[1..]),
        _ => (closed_default, t),
    };
    let (hi_closed, body) = match body.chars().last() {
        Some(']') => (true, &body[..body.len() - 1]),
        Some(')') => (false, &body[..body.len() - 1]),
        _ => (closed_default, body),
    };
    let (a, b) = body
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("interval {text:?} needs two endpoints")))?;
    Ok(Interval::new(parse_rational(a)?, parse_rational(b)?, lo_closed, hi_closed)?)
}

fn check_budget(what: &str, n: Digit, max_len: usize, cfg: &RunConfig) -> Result<(), Failure> {
    let total: u128 = (1..=max_len as u32).map(|k| (n as u128).saturating_pow(k)).sum();
    if total > cfg.max_cover {
        return Err(Failure::Run(format!(
            "budget exceeded: {what} needs {total} words, limit is {}",
            cfg.max_cover
        )));
    }
    Ok(())
}

fn expand(x: &str) -> Outcome {
    let x: Rational = parse_rational(x)?;
    let w = cf_expand_rational(&x)?;
    print_json(&json!({
        "x": to_pq(&x),
        "digits": w.digits(),
        "convergents": pq_list(&convergents(&w)),
    }));
    Ok(true)
}

fn cylinder_report(w: &Word, cfg: &RunConfig) -> Outcome {
    let c = cylinder(w);
    let measure = gauss_measure(&c.interval(), cfg.precision)?;
    print_json(&json!({
        "word": w.digits(),
        "lo": to_pq(&c.lo),
        "hi": to_pq(&c.hi),
        "length": to_pq(&c.length()),
        "p": c.p.to_string(),
        "q": c.q.to_string(),
        "q_prev": c.q_prev.to_string(),
        "convergents": pq_list(&convergents(w)),
        "gauss_measure": measure,
    }));
    Ok(true)
}

fn construct(n: Digit, seed: Option<&str>, length: usize, invert: Option<&Word>, cfg: &RunConfig) -> Outcome {
    if let Some(w) = invert {
        let seed = delta_inverse_prefix(n, w)?;
        match cfg.format {
            Some(Format::Json) => print_json(&json!({
                "N": n,
                "prefix": w.digits(),
                "seed": seed.as_ref().map(|s| s.digits()),
            })),
            _ => match &seed {
                Some(s) => emit(&format!("{s}\n")),
                None => emit("not a prefix of the image\n"),
            },
        }
        return Ok(seed.is_some());
    }
    let seed = seed.expect("clap requires --seed without --invert");
    let spec = SeedSpec::parse(n, seed)?;
    let w = delta_map(&spec).prefix(length);
    match cfg.format {
        Some(Format::Json) => print_json(&json!({
            "N": n,
            "seed": spec.seed().describe(),
            "length": length,
            "digits": w.digits(),
        })),
        _ => emit(&format!("{w}\n")),
    }
    Ok(true)
}

fn scramble(a: &ScrambleArgs, cfg: &RunConfig) -> Outcome {
    let spec_a = SeedSpec::parse(a.n_a, &a.seed_a)?;
    let spec_b = SeedSpec::parse(a.n_b, &a.seed_b)?;
    let config = ScrambleConfig {
        count: a.count,
        delta: a.delta.as_deref().map(parse_rational).transpose()?,
        j_max: a.j_max,
        horizon: a.horizon,
        depth_cap: cfg.max_depth,
    };
    let report = verify_scrambled_pair(&spec_a, &spec_b, &config)?;
    for d in &report.diagnostics {
        eprintln!("{d}");
    }
    print_json(&to_json(&report));
    Ok(report.verdict)
}

fn dim(kind: SetKind, n: Digit, depth: u64, tol: f64, cfg: &RunConfig) -> Outcome {
    let series = dim_series(kind, n, depth, tol, cfg.max_cover)?;
    match cfg.format {
        Some(Format::Json) => {
            let mut v = json!({ "estimates": series.estimates, "diagnostic": series.diagnostic });
            if let (SetKind::En, Ok(b)) = (kind, jarnik_bracket(n, cfg.precision)) {
                v["jarnik_bracket"] = json!({ "lo": b.lo, "hi": b.hi });
            }
            print_json(&v);
        }
        _ => emit(&to_csv(&series.estimates)),
    }
    if let Some(d) = &series.diagnostic {
        return Err(Failure::Run(d.clone()));
    }
    Ok(true)
}

fn density(cmd: &DensityCommand, cfg: &RunConfig) -> Outcome {
    match cmd {
        DensityCommand::Sample {
            count,
            digits,
            bits,
            min_fraction,
            corpus,
        } => {
            if let Some(path) = corpus {
                let batch = sample_batch(cfg.seed, *count, *digits, *bits)?;
                let file = File::create(path)
                    .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
                let mut out = BufWriter::new(file);
                write_ndjson(&batch, &mut out)?;
                out.flush()
                    .map_err(|e| Failure::Run(format!("cannot write {}: {e}", path.display())))?;
            }
            let stats = digit_one_fraction(cfg.seed, *count, *digits, *bits)?;
            let pass = min_fraction.is_none_or(|m| stats.fraction >= m);
            let mut v = to_json(&stats);
            v["root_seed"] = json!(cfg.seed);
            print_json(&v);
            Ok(pass)
        }
        DensityCommand::Replay { corpus } => {
            let file = File::open(corpus)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", corpus.display())))?;
            let records = read_ndjson(BufReader::new(file))?;
            let mut mismatches = vec![];
            for (i, r) in records.iter().enumerate() {
                if !r.replays()? {
                    mismatches.push(i + 1);
                }
            }
            print_json(&json!({ "records": records.len(), "mismatched_lines": mismatches }));
            Ok(mismatches.is_empty())
        }
        DensityCommand::Invariance { interval, branches } => {
            let iv = parse_interval(interval, true)?;
            let c = invariance_check(&iv, *branches, cfg.precision)?;
            print_json(&to_json(&c));
            Ok(c.within)
        }
        DensityCommand::Scan {
            digits,
            corpus,
            k_max,
            m_max,
            word,
        } => {
            let sequences: Vec<Vec<Digit>> = match (digits, corpus) {
                (Some(d), _) => vec![d.digits().to_vec()],
                (None, Some(path)) => {
                    let file = File::open(path)
                        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
                    read_ndjson(BufReader::new(file))?
                        .into_iter()
                        .map(|r| r.digits)
                        .collect()
                }
                (None, None) => unreachable!("clap requires --digits or --corpus"),
            };
            let budget = u64::try_from(cfg.max_cover).unwrap_or(u64::MAX);
            let mut reports = vec![];
            for s in &sequences {
                let mut v = to_json(coverage_scan(s, *k_max, *m_max, budget)?);
                if let Some(u) = word {
                    v["word"] = json!(u.digits());
                    v["first_occurrence"] = json!(word_occurs(s, u.digits()));
                }
                reports.push(v);
            }
            print_json(&Value::Array(reports));
            Ok(true)
        }
        DensityCommand::Bounded {
            interval,
            horizon,
            max_len,
        } => {
            let iv = parse_interval(interval, false)?;
            let p = bounded_point_in_interval(&iv, *max_len)?;
            let cert = p.missing_word_certificate(*horizon)?;
            let absent = Word::new(vec![p.bound + 1])?;
            let certified = cert.missing.contains(&absent);
            print_json(&json!({
                "interval": iv,
                "point": to_json(&p),
                "tail": "1,1,1,...",
                "certificate": cert,
                "absent_digit": p.bound + 1,
                "certified": certified,
            }));
            Ok(certified)
        }
    }
}

fn q_growth(max_digit: Digit, max_len: usize, cfg: &RunConfig) -> Outcome {
    check_budget("q-growth", max_digit, max_len, cfg)?;
    let mut words = 0u64;
    let mut failures = vec![];
    for len in 1..=max_len {
        for d in WordOdometer::new(max_digit, len) {
            words += 1;
            let w = Word::new(d)?;
            let q = cylinder(&w).q;
            if &q * &q < BigUint::from(1u8) << (len - 1) {
                failures.push(w.to_string());
            }
        }
    }
    print_json(&json!({
        "check": "q_n^2 >= 2^(n-1)",
        "max_digit": max_digit,
        "max_len": max_len,
        "words": words,
        "failures": failures.len(),
        "examples": failures.iter().take(16).collect::<Vec<_>>(),
    }));
    Ok(failures.is_empty())
}

fn drop_ratio(max_digit: Digit, max_len: usize, cfg: &RunConfig) -> Outcome {
    check_budget("drop-ratio", max_digit, max_len, cfg)?;
    let mut checks = 0u64;
    let mut failures = vec![];
    // extremes of ratio / (a_k + 1), which the lemma puts in [1/2, 1]
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for len in 1..=max_len {
        for d in WordOdometer::new(max_digit, len) {
            let w = Word::new(d)?;
            for k in 1..=len {
                checks += 1;
                let r = drop_digit_ratio(&w, k)?;
                let scaled = r / int(w.digits()[k - 1] + 1);
                if scaled < Rational::new(1.into(), 2.into()) || scaled > int(1) {
                    failures.push(format!("({w}), k={k}"));
                }
                if lo.as_ref().is_none_or(|l| scaled < *l) {
                    lo = Some(scaled.clone());
                }
                if hi.as_ref().is_none_or(|h| scaled > *h) {
                    hi = Some(scaled);
                }
            }
        }
    }
    print_json(&json!({
        "check": "(a_k+1)/2 <= q_n(w)/q_{n-1}(w without a_k) <= a_k+1",
        "max_digit": max_digit,
        "max_len": max_len,
        "checks": checks,
        "min_scaled_ratio": lo.as_ref().map(to_pq),
        "max_scaled_ratio": hi.as_ref().map(to_pq),
        "failures": failures.len(),
        "examples": failures.iter().take(16).collect::<Vec<_>>(),
    }));
    Ok(failures.is_empty())
}

fn lemma(cmd: &LemmaCommand, cfg: &RunConfig) -> Outcome {
    match cmd {
        LemmaCommand::QuasiMult { max_digit, max_len } => {
            check_budget("quasi-mult", *max_digit, *max_len, cfg)?;
            let r = quasi_mult_battery(*max_digit, *max_len);
            print_json(&to_json(&r));
            Ok(r.passed())
        }
        LemmaCommand::DropRatio { max_digit, max_len } => drop_ratio(*max_digit, *max_len, cfg),
        LemmaCommand::QGrowth { max_digit, max_len } => q_growth(*max_digit, *max_len, cfg),
        LemmaCommand::Gap { n_alpha, max_len } => {
            if *n_alpha < 2 {
                return Err(Failure::Usage(format!("N = {n_alpha} must be >= 2")));
            }
            let words = (*n_alpha as u128).saturating_pow(*max_len as u32);
            if words.saturating_mul(words) / 2 > cfg.max_cover.saturating_mul(64) {
                return Err(Failure::Run(format!(
                    "budget exceeded: gap battery with {words} words per length"
                )));
            }
            let r = gap_lemma_battery(*n_alpha, *max_len);
            print_json(&to_json(&r));
            Ok(r.passed())
        }
        LemmaCommand::Holder {
            n_alpha,
            eps,
            samples,
            depth,
        } => {
            let eps = parse_rational(eps)?;
            let depth = match depth {
                Some(d) => *d,
                None => holder_k(*n_alpha, &eps)?,
            };
            let r = holder_check(*n_alpha, &eps, depth, *samples, cfg.seed)?;
            print_json(&to_json(&r));
            Ok(r.pass)
        }
        LemmaCommand::Schedule { limit } => {
            let b = schedule_bounds(*limit);
            let refs = check_schedule_references((*limit).min(10_000));
            let mut v = to_json(&b);
            v["references_checked_to"] = json!((*limit).min(10_000));
            v["references_ok"] = json!(refs.is_ok());
            print_json(&v);
            Ok(b.passed() && refs.is_ok())
        }
    }
}

fn self_check() -> Outcome {
    let mut checks = vec![];
    let mut push = |name: &str, pass: bool, detail: Value| {
        checks.push(json!({ "name": name, "pass": pass, "detail": detail }));
        pass
    };
    let mut ok = true;
    let cyl = cylinder_battery(8, 5);
    ok &= push("cylinder identities (digits <= 8, length <= 5)", cyl.passed(), to_json(&cyl));
    let qm = quasi_mult_battery(5, 6);
    ok &= push("quasi-multiplicativity (digits <= 5, length <= 6)", qm.passed(), to_json(&qm));
    let gap = gap_lemma_battery(3, 4);
    ok &= push("gap lemma (N = 3, length <= 4)", gap.passed(), to_json(&gap));
    let sched = schedule_bounds(100_000);
    ok &= push("schedule bounds (n <= 10^5)", sched.passed(), to_json(&sched));
    let refs = check_schedule_references(10_000);
    ok &= push(
        "schedule references (n <= 10^4)",
        refs.is_ok(),
        json!(refs.err().map(|e| e.to_string())),
    );
    let strip = (1..=12).all(|len| stripped_is_longer(2, len));
    ok &= push("stripping R digits lengthens cylinders (N = 2, length <= 12)", strip, Value::Null);
    print_json(&json!({ "checks": checks, "pass": ok }));
    Ok(ok)
}

fn run(cli: &Cli, cfg: &RunConfig) -> Outcome {
    if cli.self_check {
        let ok = self_check()?;
        if cli.command.is_none() || !ok {
            return Ok(ok);
        }
    }
    match &cli.command {
        None => Err(Failure::Usage("no subcommand given (see --help)".into())),
        Some(Command::Expand { x }) => expand(x),
        Some(Command::Cylinder { word }) => cylinder_report(word, cfg),
        Some(Command::Construct {
            n_alpha,
            seed,
            length,
            invert,
        }) => construct(*n_alpha, seed.as_deref(), *length, invert.as_ref(), cfg),
        Some(Command::Scramble(a)) => scramble(a, cfg),
        Some(Command::Dim {
            set_kind,
            n_alpha,
            depth,
            tol,
        }) => dim(*set_kind, *n_alpha, *depth, *tol, cfg),
        Some(Command::Density { command }) => density(command, cfg),
        Some(Command::LemmaCheck { command }) => lemma(command, cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        precision: cli.precision,
        max_cover: cli.max_cover,
        max_depth: cli.max_depth,
        seed: cli.rng_seed,
        format: cli.format,
        threads: cli.threads,
    };
    let cfg = match RunConfig::resolve(cli.config.as_deref(), std::env::var(THREADS_ENV).ok(), &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

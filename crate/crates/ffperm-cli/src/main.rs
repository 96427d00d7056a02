//! Experiment harness CLI: cycle-structure sampling, distinguishing games,
//! oracle equivalence checks, tail bounds, and fast-forward evaluation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use ffperm::ccl::{self, TailBoundParams};
use ffperm::ff::FFPerm;
use ffperm::lab::{
    all_cycluses, all_permutations, cyclus_transcript_probability, lazy_response_distribution,
    nonrepeating_transcript_len, response_distribution_over, run_game, AdvantageEstimate,
    ConstantZero, Distinguisher, LargestCycleProbe, NonrepeatingCycleDetector,
    PrimeQuotientCyclusTest, QueryPolicy, SingleQueryCyclusTest,
};
use ffperm::oracle::{
    default_truncation, oracle_c, oracle_f, oracle_fprime, oracle_o2, oracle_o3, oracle_p,
    oracle_pff, BasicQuery, Direction, KeyedCclOptions, OracleError, OracleHandle, OracleRng,
};

#[derive(Parser)]
#[command(
    name = "ffperm",
    version,
    about = "Fast-forward permutation experiment harness"
)]
struct Cli {
    /// Master seed for randomized subcommands. The FFPERM_SEED environment
    /// variable overrides this flag; without either, a clock-derived seed is
    /// used.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for trial loops.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Sample ordered cycle structures, or print the exact distribution.
    SampleOcs {
        #[arg(long)]
        n: u64,
        /// Number of samples to draw.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Cap the number of entries; the final block is force-closed.
        #[arg(long)]
        truncate: Option<u64>,
        /// Print the exact distribution (small n) instead of sampling.
        #[arg(long)]
        exact: bool,
    },
    /// Estimate the advantage of a strategy between two oracles.
    Advantage {
        #[arg(long = "oracle-a")]
        oracle_a: String,
        #[arg(long = "oracle-b")]
        oracle_b: String,
        /// nonrep | nonrep-mixed | single-query | prime-quotient |
        /// largest-cycle | const-zero
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        n: u64,
        /// Query budget for the nonrepeating strategies.
        #[arg(long, default_value_t = 0)]
        m: u64,
        /// Trials per side.
        #[arg(long)]
        trials: u64,
        /// Truncation length for the `f`/`fprime` oracles.
        #[arg(long)]
        l: Option<u64>,
        /// Hex key fixing the `fprime` oracle; omit for a fresh key per trial.
        #[arg(long)]
        key: Option<String>,
        /// Counter start for the `fprime` oracle.
        #[arg(long, default_value_t = 0)]
        p0: u64,
        /// Exponent probed by the largest-cycle strategy.
        #[arg(long)]
        a0: Option<i64>,
        /// Points probed by the largest-cycle strategy.
        #[arg(long)]
        k: Option<u64>,
        /// Single-call derivation preset for `fprime`.
        #[arg(long)]
        rnd3: bool,
    },
    /// Exact response-distribution comparison of the lazily sampled oracles
    /// against enumeration, for every query sequence up to a depth.
    EquivTest {
        /// Domain size (at most 5).
        #[arg(long)]
        n: u64,
        /// Maximum query-sequence length (at most 3).
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Tail bound on the sampler's cut points: Prob\[s_l < m\].
    TailBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        m: u64,
    },
    /// Evaluate a power of the permutation coded by a cycle-length sequence.
    FfEval {
        /// Comma-separated cycle lengths, e.g. 1,2,4.
        #[arg(long, value_delimiter = ',')]
        code: Vec<u64>,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        m: i64,
    },
    /// Answer a file of power queries with the keyed oracle.
    FOracle {
        #[arg(long)]
        n: u64,
        /// Hex master key; falls back to the FFPERM_KEY environment variable.
        #[arg(long)]
        key: Option<String>,
        /// File with one JSON `[x, m]` query per line.
        #[arg(long)]
        queries: PathBuf,
        /// Truncation length override.
        #[arg(long)]
        l: Option<u64>,
        /// Counter start.
        #[arg(long, default_value_t = 0)]
        p0: u64,
        /// Single-call derivation preset.
        #[arg(long)]
        rnd3: bool,
    },
}

/// Usage errors exit 2; failed runs and failed checks exit 1.
enum CliError {
    Usage(String),
    Run(String),
    CheckFailed,
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<ffperm::lab::LabError> for CliError {
    fn from(e: ffperm::lab::LabError) -> Self {
        CliError::Run(e.to_string())
    }
}

impl From<ccl::CclError> for CliError {
    fn from(e: ccl::CclError) -> Self {
        CliError::Run(e.to_string())
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Ok(text) = std::env::var("FFPERM_SEED") {
        return text
            .parse()
            .map_err(|_| CliError::Usage(format!("FFPERM_SEED is not a u64: {text}")));
    }
    Ok(flag.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    }))
}

fn resolve_key(flag: Option<String>) -> Result<Option<Vec<u8>>, CliError> {
    let text = match flag.or_else(|| std::env::var("FFPERM_KEY").ok()) {
        Some(t) => t,
        None => return Ok(None),
    };
    hex::decode(&text)
        .map(Some)
        .map_err(|e| CliError::Usage(format!("key is not valid hex: {e}")))
}

type Factory = Box<dyn Fn(OracleRng) -> Result<OracleHandle, OracleError> + Sync>;

fn oracle_factory(
    id: &str,
    n: u64,
    l: Option<u64>,
    key: Option<Vec<u8>>,
    p0: u64,
    rnd3: bool,
) -> Result<Factory, CliError> {
    let opts = KeyedCclOptions {
        truncation: l,
        single_call: rnd3,
    };
    Ok(match id {
        "c" => Box::new(move |rng| oracle_c(n, rng)),
        "o2" => Box::new(move |rng| oracle_o2(n, rng)),
        "o3" => Box::new(move |rng| oracle_o3(n, rng)),
        "p" => Box::new(move |rng| oracle_p(n, rng)),
        "pff" => Box::new(move |rng| oracle_pff(n, rng)),
        "f" => {
            let l = l.unwrap_or_else(|| default_truncation(n));
            Box::new(move |rng| oracle_f(n, l, rng))
        }
        "fprime" => match key {
            Some(key) => Box::new(move |_rng| oracle_fprime(n, &key, p0, opts)),
            None => Box::new(move |mut rng| {
                let key = ffperm::oracle::random_key(&mut rng);
                oracle_fprime(n, &key, p0, opts)
            }),
        },
        other => {
            return Err(CliError::Usage(format!(
                "unknown oracle `{other}` (expected c|o2|o3|p|pff|f|fprime)"
            )))
        }
    })
}

fn strategy_from_id(
    id: &str,
    m: u64,
    a0: Option<i64>,
    k: Option<u64>,
) -> Result<Box<dyn Distinguisher>, CliError> {
    Ok(match id {
        "nonrep" => Box::new(NonrepeatingCycleDetector::new(m)),
        "nonrep-mixed" => Box::new(NonrepeatingCycleDetector::with_policy(
            m,
            QueryPolicy::Alternating,
        )),
        "single-query" => Box::new(SingleQueryCyclusTest),
        "prime-quotient" => Box::new(PrimeQuotientCyclusTest),
        "largest-cycle" => {
            let exponent =
                a0.ok_or_else(|| CliError::Usage("largest-cycle needs --a0".into()))?;
            let points = k.ok_or_else(|| CliError::Usage("largest-cycle needs --k".into()))?;
            Box::new(LargestCycleProbe { exponent, points })
        }
        "const-zero" => Box::new(ConstantZero),
        other => {
            return Err(CliError::Usage(format!(
                "unknown strategy `{other}` (expected nonrep|nonrep-mixed|single-query|prime-quotient|largest-cycle|const-zero)"
            )))
        }
    })
}

fn lengths_key(lengths: &[u64]) -> String {
    lengths
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_sample_ocs(
    n: u64,
    count: u64,
    truncate: Option<u64>,
    exact: bool,
    seed: u64,
    format: Format,
) -> Result<(), CliError> {
    if exact {
        let dist = ccl::ocs_exact_distribution(n).map_err(|e| CliError::Usage(e.to_string()))?;
        match format {
            Format::Json => {
                let map: BTreeMap<String, String> = dist
                    .iter()
                    .map(|(k, p)| (lengths_key(k.lengths()), p.to_string()))
                    .collect();
                println!("{}", serde_json::to_string(&map).expect("serializable map"));
            }
            Format::Csv => {
                println!("lengths,probability");
                for (k, p) in &dist {
                    println!("{},{}", lengths_key(k.lengths()).replace(',', " "), p);
                }
            }
        }
        return Ok(());
    }
    let mut rng = ffperm::oracle::seeded_rng(seed);
    if format == Format::Csv {
        println!("sample,lengths");
    }
    for i in 0..count {
        let sample = match truncate {
            Some(l) => ccl::truncated_ccl(n, l, &mut rng)?,
            None => ccl::ccl(n, &mut rng)?,
        };
        match format {
            Format::Json => println!(
                "{}",
                serde_json::to_string(sample.lengths()).expect("serializable lengths")
            ),
            Format::Csv => {
                let joined = sample
                    .lengths()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                println!("{i},{joined}");
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_advantage(
    oracle_a: &str,
    oracle_b: &str,
    strategy_id: &str,
    n: u64,
    m: u64,
    trials: u64,
    l: Option<u64>,
    key: Option<String>,
    p0: u64,
    a0: Option<i64>,
    k: Option<u64>,
    rnd3: bool,
    seed: u64,
    jobs: usize,
    format: Format,
) -> Result<(), CliError> {
    let key = resolve_key(key)?;
    let make_a = oracle_factory(oracle_a, n, l, key.clone(), p0, rnd3)?;
    let make_b = oracle_factory(oracle_b, n, l, key, p0, rnd3)?;
    let strategy = strategy_from_id(strategy_id, m, a0, k)?;
    let est = run_game(&*make_a, &*make_b, &*strategy, trials, seed, jobs)?;
    print_estimate(strategy_id, n, m, &est, format);
    Ok(())
}

fn print_estimate(strategy: &str, n: u64, m: u64, est: &AdvantageEstimate, format: Format) {
    match format {
        Format::Json => {
            println!(
                "{}",
                serde_json::json!({
                    "strategy": strategy,
                    "n": n,
                    "m": m,
                    "trials": est.trials_per_side,
                    "p_a": est.p_a,
                    "p_b": est.p_b,
                    "advantage": est.advantage,
                    "ci": est.ci_halfwidth,
                })
            );
        }
        Format::Csv => {
            println!("strategy,n,m,trials,p_a,p_b,advantage,ci");
            println!(
                "{strategy},{n},{m},{},{},{},{},{}",
                est.trials_per_side, est.p_a, est.p_b, est.advantage, est.ci_halfwidth
            );
        }
    }
}

fn all_query_sequences(n: u64, len: usize) -> Vec<Vec<BasicQuery>> {
    let atoms: Vec<BasicQuery> = (0..n)
        .flat_map(|x| {
            [
                BasicQuery {
                    x,
                    dir: Direction::Forward,
                },
                BasicQuery {
                    x,
                    dir: Direction::Backward,
                },
            ]
        })
        .collect();
    let mut seqs: Vec<Vec<BasicQuery>> = vec![vec![]];
    for _ in 0..len {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                atoms.iter().map(move |&a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    seqs
}

fn cmd_equiv_test(n: u64, depth: usize) -> Result<(), CliError> {
    if n == 0 || n > 5 {
        return Err(CliError::Usage(format!(
            "equiv-test supports 1 <= n <= 5, got {n}"
        )));
    }
    if depth == 0 || depth > 3 {
        return Err(CliError::Usage(format!(
            "equiv-test supports 1 <= depth <= 3, got {depth}"
        )));
    }
    let cycluses = all_cycluses(n)?;
    let perms = all_permutations(n)?;
    let mut all_ok = true;
    for (label, reference, include_own) in [
        ("cyclus pair (c vs o2)", &cycluses, false),
        ("permutation pair (p vs o3)", &perms, true),
    ] {
        let mut sequences = 0u64;
        let mut mismatches = 0u64;
        for len in 1..=depth {
            for seq in all_query_sequences(n, len) {
                sequences += 1;
                let by_enum = response_distribution_over(reference, &seq);
                let by_lazy = lazy_response_distribution(n, include_own, &seq)?;
                if by_enum != by_lazy {
                    mismatches += 1;
                }
            }
        }
        let ok = mismatches == 0;
        all_ok &= ok;
        println!(
            "{label}: {sequences} query sequences, mismatching distributions: {mismatches} -> {}",
            if ok { "PASS" } else { "FAIL" }
        );
    }

    // Transcript law: every nonrepeating transcript of length k against the
    // cyclus pair has probability (n-k-1)!/(n-1)!.
    let mut checked = 0u64;
    let mut law_violations = 0u64;
    for len in 1..=depth {
        for seq in all_query_sequences(n, len) {
            for (responses, prob) in response_distribution_over(&cycluses, &seq) {
                if let Some(k) = nonrepeating_transcript_len(n, &seq, &responses) {
                    checked += 1;
                    if prob != cyclus_transcript_probability(n, k) {
                        law_violations += 1;
                    }
                }
            }
        }
    }
    let law_ok = law_violations == 0;
    all_ok &= law_ok;
    println!(
        "transcript law ((n-k-1)!/(n-1)!): {checked} nonrepeating transcripts, violations: {law_violations} -> {}",
        if law_ok { "PASS" } else { "FAIL" }
    );

    if all_ok {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}

fn cmd_tail_bound(n: u64, l: u64, m: u64) -> Result<(), CliError> {
    let params = TailBoundParams::new(n, l, m).map_err(|e| CliError::Usage(e.to_string()))?;
    let bound = ccl::tail_bound(&params).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{bound}");
    Ok(())
}

fn cmd_ff_eval(code: &[u64], x: u64, m: i64) -> Result<(), CliError> {
    let ff = FFPerm::from_lengths(code).map_err(|e| CliError::Usage(e.to_string()))?;
    let y = ff
        .eval_pow(x, m)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{y}");
    Ok(())
}

fn cmd_f_oracle(
    n: u64,
    key: Option<String>,
    queries: &PathBuf,
    l: Option<u64>,
    p0: u64,
    rnd3: bool,
) -> Result<(), CliError> {
    let key = resolve_key(key)?
        .ok_or_else(|| CliError::Usage("f-oracle needs --key or FFPERM_KEY".into()))?;
    let opts = KeyedCclOptions {
        truncation: l,
        single_call: rnd3,
    };
    let mut oracle = oracle_fprime(n, &key, p0, opts)?;
    let text = std::fs::read_to_string(queries)
        .map_err(|e| CliError::Run(format!("cannot read {}: {e}", queries.display())))?;
    let mut out = String::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let pair: (u64, i64) = serde_json::from_str::<[serde_json::Value; 2]>(line)
            .ok()
            .and_then(|[x, m]| Some((x.as_u64()?, m.as_i64()?)))
            .ok_or_else(|| {
                CliError::Run(format!("line {}: expected a JSON [x, m] pair", lineno + 1))
            })?;
        let y = oracle.query_pow(pair.0, pair.1)?;
        writeln!(
            out,
            "{}",
            serde_json::json!({"q": [pair.0, pair.1], "r": y})
        )
        .expect("string write");
    }
    print!("{out}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let seed = resolve_seed(cli.seed)?;
    match cli.command {
        Command::SampleOcs {
            n,
            count,
            truncate,
            exact,
        } => cmd_sample_ocs(n, count, truncate, exact, seed, cli.format),
        Command::Advantage {
            oracle_a,
            oracle_b,
            strategy,
            n,
            m,
            trials,
            l,
            key,
            p0,
            a0,
            k,
            rnd3,
        } => cmd_advantage(
            &oracle_a, &oracle_b, &strategy, n, m, trials, l, key, p0, a0, k, rnd3, seed, cli.jobs,
            cli.format,
        ),
        Command::EquivTest { n, depth } => cmd_equiv_test(n, depth),
        Command::TailBound { n, l, m } => cmd_tail_bound(n, l, m),
        Command::FfEval { code, x, m } => cmd_ff_eval(&code, x, m),
        Command::FOracle {
            n,
            key,
            queries,
            l,
            p0,
            rnd3,
        } => cmd_f_oracle(n, key, &queries, l, p0, rnd3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::CheckFailed) => ExitCode::from(1),
    }
}

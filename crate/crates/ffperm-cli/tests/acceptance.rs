//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible with `--nocapture`). Monte-Carlo criteria
//! use fixed seeds, so the suite is deterministic.

use std::process::Command;
use std::time::{Duration, Instant};

use ffperm::ccl::{self, TailBoundParams};
use ffperm::ff::FFPerm;
use ffperm::graph::{EdgeEffect, PartialPermGraph};
use ffperm::lab::{
    all_cycluses, all_permutations, cyclus_transcript_probability, lazy_response_distribution,
    nonrepeating_transcript_len, perm_transcript_probability, response_distribution_over, run_game,
    NonrepeatingCycleDetector, SingleQueryCyclusTest,
};
use ffperm::oracle::{
    default_truncation, oracle_c, oracle_f, oracle_p, oracle_pff, seeded_rng, BasicQuery, Direction,
};
use ffperm::perm::{for_each_permutation, Permutation};
use ffperm::prng::pair_combine;
use rand::Rng;

fn assert_within_budget(elapsed: Duration, budget: Duration, criterion: &str) {
    assert!(
        elapsed <= budget,
        "{criterion}: took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn c01_ff_evaluation_ground_truth() {
    // Warm-up run, then a timed one.
    let _ = FFPerm::from_lengths(&[1, 2, 4]).unwrap().eval_pow(4, 5);
    let start = Instant::now();
    let ff = FFPerm::from_lengths(&[1, 2, 4]).unwrap();
    let y = ff.eval_pow(4, 5).unwrap();
    let explicit = ff.to_explicit().unwrap();
    let elapsed = start.elapsed();
    assert_eq!(y, 5);
    let expected: Vec<Vec<u64>> = vec![vec![0], vec![1, 2], vec![3, 4, 5, 6]];
    assert_eq!(explicit.cycle_decomposition().cycles(), expected.as_slice());
    assert_within_budget(elapsed, Duration::from_millis(1), "criterion 1");
    println!("acceptance 01 ff evaluation ground truth: PASS ({elapsed:?})");
}

#[test]
fn c02_ocs_worked_example() {
    // Cycles (0 5), (1 4 2), (3).
    let p = Permutation::new(vec![5, 4, 1, 3, 2, 0]).unwrap();
    assert_eq!(p.ocs(), vec![2, 3, 1]);
    println!("acceptance 02 ordered cycle structure example: PASS");
}

#[test]
fn c03_sampler_distribution_equals_enumeration() {
    let start = Instant::now();
    for n in 2..=7u64 {
        let enumerated = ccl::ocs_exact_distribution(n).unwrap();
        let recursive = ccl::ccl_exact_distribution(n).unwrap();
        assert_eq!(enumerated, recursive, "n={n}");
    }
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(30), "criterion 3");
    println!("acceptance 03 sampler distribution exact equality n=2..7: PASS ({elapsed:?})");
}

#[test]
fn c04_cycle_length_of_zero_exactly_uniform() {
    let start = Instant::now();
    let mut counts = [0u64; 9];
    for_each_permutation(8, |p| counts[p.cycle_len(0) as usize] += 1).unwrap();
    let elapsed = start.elapsed();
    for (len, &count) in counts.iter().enumerate().skip(1) {
        assert_eq!(count, 5040, "length {len}");
    }
    assert_within_budget(elapsed, Duration::from_secs(10), "criterion 4");
    println!("acceptance 04 cycle length of 0 uniform over S_8: PASS ({elapsed:?})");
}

#[test]
fn c05_extension_counts_match_brute_force() {
    let start = Instant::now();
    let mut rng = seeded_rng(505);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.random_range(1..=7u64);
        // Random proper partial cyclus graph: random count of random legal
        // non-closing edges.
        let mut g = PartialPermGraph::new(n).unwrap();
        let target = rng.random_range(0..n);
        while g.edge_count() < target {
            let tails: Vec<u64> = (0..n).filter(|&v| g.successor(v).is_none()).collect();
            let x = tails[rng.random_range(0..tails.len())];
            let heads: Vec<u64> = (0..n)
                .filter(|&v| g.predecessor(v).is_none() && !g.same_component(v, x))
                .collect();
            if heads.is_empty() {
                break;
            }
            let y = heads[rng.random_range(0..heads.len())];
            assert_eq!(g.add_edge(x, y).unwrap(), EdgeEffect::MergedComponents);
        }
        let mut brute = 0u128;
        for c in all_cycluses(n).unwrap() {
            if g.edges().iter().all(|&(x, y)| c.apply(x) == y) {
                brute += 1;
            }
        }
        assert_eq!(
            g.count_cyclus_extensions().unwrap(),
            brute,
            "n={n} edges={:?}",
            g.edges()
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(60), "criterion 5");
    println!("acceptance 05 extension counting vs brute force (1000 graphs): PASS ({elapsed:?})");
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

#[test]
fn c06_lazy_oracles_exactly_equivalent_at_n5() {
    let start = Instant::now();
    let n = 5u64;
    let cycluses = all_cycluses(n).unwrap();
    let perms = all_permutations(n).unwrap();
    let mut sequences = 0u64;
    let mut cyclus_transcripts = 0u64;
    let mut perm_transcripts = 0u64;
    for len in 1..=3usize {
        for seq in all_query_sequences(n, len) {
            sequences += 1;
            let cyclus_enum = response_distribution_over(&cycluses, &seq);
            assert_eq!(
                cyclus_enum,
                lazy_response_distribution(n, false, &seq).unwrap(),
                "cyclus pair, seq {seq:?}"
            );
            let perm_enum = response_distribution_over(&perms, &seq);
            assert_eq!(
                perm_enum,
                lazy_response_distribution(n, true, &seq).unwrap(),
                "perm pair, seq {seq:?}"
            );
            for (responses, prob) in &cyclus_enum {
                if let Some(k) = nonrepeating_transcript_len(n, &seq, responses) {
                    assert_eq!(*prob, cyclus_transcript_probability(n, k));
                    cyclus_transcripts += 1;
                }
            }
            for (responses, prob) in &perm_enum {
                if let Some(k) = nonrepeating_transcript_len(n, &seq, responses) {
                    assert_eq!(*prob, perm_transcript_probability(n, k));
                    perm_transcripts += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(sequences, 10 + 100 + 1000);
    assert!(cyclus_transcripts > 0 && perm_transcripts > 0);
    assert_within_budget(elapsed, Duration::from_secs(60), "criterion 6");
    println!(
        "acceptance 06 exact oracle equivalence at n=5 (depth 3, {sequences} sequences): PASS ({elapsed:?})"
    );
}

#[test]
fn c07_nonrepeating_detector_advantage() {
    let start = Instant::now();
    let d = NonrepeatingCycleDetector::new(16);
    let est = run_game(
        &|rng| oracle_c(64, rng),
        &|rng| oracle_p(64, rng),
        &d,
        100_000,
        707,
        1,
    )
    .unwrap();
    let elapsed = start.elapsed();
    assert!(
        (est.advantage - 0.25).abs() <= 0.013,
        "advantage {} outside 0.25 +/- 0.013",
        est.advantage
    );
    assert_within_budget(elapsed, Duration::from_secs(30), "criterion 7");
    println!(
        "acceptance 07 detector advantage 0.2500±0.013 (got {:.4}): PASS ({elapsed:?})",
        est.advantage
    );
}

#[test]
fn c08_advantage_never_exceeds_query_ratio() {
    let start = Instant::now();
    let n = 64u64;
    for m in 1..=32u64 {
        let d = NonrepeatingCycleDetector::new(m);
        let est = run_game(
            &|rng| oracle_c(n, rng),
            &|rng| oracle_p(n, rng),
            &d,
            20_000,
            800 + m,
            1,
        )
        .unwrap();
        assert!(
            est.advantage <= m as f64 / n as f64 + est.ci_halfwidth,
            "m={m}: advantage {} exceeds {} + {}",
            est.advantage,
            m as f64 / n as f64,
            est.ci_halfwidth
        );
    }
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(300), "criterion 8");
    println!("acceptance 08 advantage bounded by m/n for m=1..32: PASS ({elapsed:?})");
}

#[test]
fn c09_single_query_advantage() {
    let start = Instant::now();
    let est12 = run_game(
        &|rng| oracle_c(12, rng),
        &|rng| oracle_pff(12, rng),
        &SingleQueryCyclusTest,
        100_000,
        909,
        1,
    )
    .unwrap();
    assert!(
        (est12.advantage - 0.5).abs() <= 0.015,
        "n=12: {}",
        est12.advantage
    );
    let est1024 = run_game(
        &|rng| oracle_c(1024, rng),
        &|rng| oracle_pff(1024, rng),
        &SingleQueryCyclusTest,
        100_000,
        910,
        1,
    )
    .unwrap();
    let expected = 1.0 - 11.0 / 1024.0;
    assert!(
        (est1024.advantage - expected).abs() <= 0.01,
        "n=1024: {}",
        est1024.advantage
    );
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(30), "criterion 9");
    println!(
        "acceptance 09 single-query advantage (n=12: {:.4}, n=1024: {:.4}): PASS ({elapsed:?})",
        est12.advantage, est1024.advantage
    );
}

#[test]
fn c10_prime_quotient_test_two_queries_and_advantage() {
    let d = ffperm::lab::PrimeQuotientCyclusTest;
    // Query count at n = 8: one prime factor, so exactly two queries.
    let mut probe = oracle_pff(8, seeded_rng(1001)).unwrap();
    let mut rng = seeded_rng(1002);
    let _ = ffperm::lab::Distinguisher::run(&d, &mut probe, &mut rng).unwrap();
    assert_eq!(probe.query_count(), 2);

    let est = run_game(
        &|rng| oracle_c(8, rng),
        &|rng| oracle_pff(8, rng),
        &d,
        100_000,
        1010,
        1,
    )
    .unwrap();
    assert!(
        (est.advantage - 0.875).abs() <= 0.01,
        "advantage {}",
        est.advantage
    );
    println!(
        "acceptance 10 prime-quotient test (2 queries, advantage {:.4}): PASS",
        est.advantage
    );
}

#[test]
fn c11_tail_bound_holds_empirically() {
    let start = Instant::now();
    let bound = ccl::tail_bound(&TailBoundParams {
        n: 1024,
        l: 5,
        m: 512,
    })
    .unwrap();
    assert!((bound - 6.674e-4).abs() < 1e-5);
    let trials = 100_000u64;
    let mut rng = seeded_rng(1111);
    let mut hits = 0u64;
    for _ in 0..trials {
        let sample = ccl::ccl(1024, &mut rng).unwrap();
        if sample.len() > 5 {
            let s5: u64 = sample.lengths()[..6].iter().sum();
            if s5 < 512 {
                hits += 1;
            }
        }
    }
    let fraction = hits as f64 / trials as f64;
    assert!(
        fraction <= bound,
        "empirical {fraction} exceeds bound {bound}"
    );
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(20), "criterion 11");
    println!("acceptance 11 tail bound (empirical {fraction} <= {bound:.3e}): PASS ({elapsed:?})");
}

#[test]
fn c12_tail_constant_bracketed() {
    let c = ccl::runtime_tail_constant();
    assert!(c > 3.5911 && c < 3.5912, "c = {c}");
    assert!((c * (c.ln() - 1.0) - 1.0).abs() <= 1e-9);
    println!("acceptance 12 growth constant {c:.10} in (3.5911, 3.5912): PASS");
}

#[test]
fn c13_coded_construction_indistinguishable() {
    let start = Instant::now();
    let n = 1u64 << 10;
    let l = default_truncation(n);
    let trials = 100_000u64;

    let detector = NonrepeatingCycleDetector::new(16);
    let est_detector = run_game(
        &|rng| oracle_f(n, l, rng),
        &|rng| oracle_pff(n, rng),
        &detector,
        trials,
        1313,
        1,
    )
    .unwrap();
    assert!(
        est_detector.advantage < est_detector.ci_halfwidth,
        "detector separated the pair: {est_detector:?}"
    );

    let est_single = run_game(
        &|rng| oracle_f(n, l, rng),
        &|rng| oracle_pff(n, rng),
        &SingleQueryCyclusTest,
        trials,
        1314,
        1,
    )
    .unwrap();
    assert!(
        est_single.advantage < est_single.ci_halfwidth,
        "single-query separated the pair: {est_single:?}"
    );
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(120), "criterion 13");
    println!(
        "acceptance 13 coded construction blends in (detector {:.5}, single-query {:.5}): PASS ({elapsed:?})",
        est_detector.advantage, est_single.advantage
    );
}

#[test]
fn c14_derived_stream_bias_and_counter_mode_envelope() {
    let start = Instant::now();

    // Exact bias of pair combination at n = 16, x = 10, over all 256 pairs.
    let n = 16u64;
    let x = 10u64;
    let mut counts = vec![0u64; x as usize];
    for a in 0..n {
        for b in 0..n {
            counts[pair_combine(n, x, &[a, b]).unwrap()[0] as usize] += 1;
        }
    }
    // Integer-exact TV: sum over values of |x·count - n²| / (2·n²·x).
    let tv_numerator: u64 = counts.iter().map(|&c| (x * c).abs_diff(n * n)).sum();
    // Only the partial block of size n² mod x is biased: the excess above
    // uniform on those residues equals the deficit on the others, giving
    // Σ|x·c - n²| = 2·r·(x - r) with r = n² mod x.
    let wraparound = (n * n) % x;
    let direct_numerator = 2 * wraparound * (x - wraparound);
    assert_eq!(tv_numerator, direct_numerator, "wraparound mass mismatch");
    for &c in &counts {
        let deviation = (c as f64 / (n * n) as f64 - 1.0 / x as f64).abs();
        assert!(deviation <= 1.0 / n as f64);
    }

    // Counter mode over a truly random permutation vs true randomness:
    // collision frequency among k derived values differs by at most 2k²/n.
    let big_n = 1u64 << 16;
    let k = 100usize;
    let trials = 2000u64;
    let mut rng = seeded_rng(1414);
    let mut collisions_ctr = 0u64;
    let mut collisions_iid = 0u64;
    for _ in 0..trials {
        let p = Permutation::random(big_n, &mut rng).unwrap();
        let base: Vec<u64> = (0..2 * k as u64).map(|j| p.apply(j)).collect();
        let derived = pair_combine(big_n, big_n, &base).unwrap();
        if has_duplicate(&derived) {
            collisions_ctr += 1;
        }
        let iid: Vec<u64> = (0..k).map(|_| rng.random_range(0..big_n)).collect();
        if has_duplicate(&iid) {
            collisions_iid += 1;
        }
    }
    let freq_ctr = collisions_ctr as f64 / trials as f64;
    let freq_iid = collisions_iid as f64 / trials as f64;
    let envelope = 2.0 * (k * k) as f64 / big_n as f64;
    let ci =
        3.0 * ((freq_ctr * (1.0 - freq_ctr) + freq_iid * (1.0 - freq_iid)) / trials as f64).sqrt();
    assert!(
        (freq_ctr - freq_iid).abs() <= envelope + ci,
        "deviation {} vs envelope {envelope}",
        (freq_ctr - freq_iid).abs()
    );
    let elapsed = start.elapsed();
    assert_within_budget(elapsed, Duration::from_secs(30), "criterion 14");
    println!(
        "acceptance 14 derived-stream bias exact + counter-mode envelope (|{freq_ctr:.4}-{freq_iid:.4}| <= {envelope:.3}): PASS ({elapsed:?})"
    );
}

fn has_duplicate(values: &[u64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted.windows(2).any(|w| w[0] == w[1])
}

#[test]
fn c15_cli_output_deterministic_under_fixed_seed() {
    let bin = env!("CARGO_BIN_EXE_ffperm");
    let queries_path = std::env::temp_dir().join("ffperm-acceptance-queries.jsonl");
    std::fs::write(&queries_path, "[0, 5]\n[3, -2]\n[7, 1024]\n").unwrap();
    let queries = queries_path.to_str().unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["sample-ocs", "--n", "64", "--count", "5", "--seed", "42"],
        vec![
            "sample-ocs",
            "--n",
            "64",
            "--count",
            "5",
            "--truncate",
            "4",
            "--seed",
            "42",
            "--format",
            "csv",
        ],
        vec![
            "advantage",
            "--oracle-a",
            "c",
            "--oracle-b",
            "p",
            "--strategy",
            "nonrep",
            "--n",
            "32",
            "--m",
            "8",
            "--trials",
            "2000",
            "--seed",
            "42",
        ],
        vec![
            "advantage",
            "--oracle-a",
            "f",
            "--oracle-b",
            "pff",
            "--strategy",
            "single-query",
            "--n",
            "64",
            "--trials",
            "500",
            "--seed",
            "42",
            "--format",
            "csv",
        ],
        vec!["equiv-test", "--n", "4", "--depth", "2", "--seed", "42"],
        vec![
            "tail-bound",
            "--n",
            "1024",
            "--l",
            "25",
            "--m",
            "1023",
            "--seed",
            "42",
        ],
        vec![
            "ff-eval", "--code", "1,2,4", "--x", "4", "--m", "5", "--seed", "42",
        ],
        vec![
            "f-oracle",
            "--n",
            "256",
            "--key",
            "00112233",
            "--queries",
            queries,
            "--seed",
            "42",
        ],
    ];
    for args in &cases {
        let run = || {
            Command::new(bin)
                .args(args)
                .env_remove("FFPERM_SEED")
                .env_remove("FFPERM_KEY")
                .output()
                .expect("binary runs")
        };
        let first = run();
        let second = run();
        assert!(
            first.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&first.stderr)
        );
        assert_eq!(first.status.code(), second.status.code(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert!(!first.stdout.is_empty(), "{args:?} produced no output");
    }
    println!(
        "acceptance 15 CLI determinism across {} subcommand invocations: PASS",
        cases.len()
    );
}

//! Exact response-distribution comparisons between oracle pairs.
//!
//! For a fixed query sequence, two routes compute the distribution of the
//! response tuple with exact rational arithmetic:
//!
//! * enumeration: walk every hidden permutation (or cyclus) and read off
//!   its deterministic responses;
//! * expansion: run the lazy oracle core, branching over each of its
//!   equally likely component choices instead of drawing one.
//!
//! The two routes are independent implementations of the same distribution,
//! so exact equality between them is the correctness check for the lazy
//! sampling rules.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::PartialPermGraph;
use crate::lab::LabError;
use crate::oracle::lazy::LazyCore;
use crate::oracle::{BasicQuery, Direction, OracleError};
use crate::perm::{for_each_cyclus, for_each_permutation, Permutation};

pub type ResponseDistribution = BTreeMap<Vec<u64>, BigRational>;

/// All cycluses of `S_n`, materialized.
pub fn all_cycluses(n: u64) -> Result<Vec<Permutation>, LabError> {
    let mut out = Vec::new();
    for_each_cyclus(n, |c| out.push(c.clone()))?;
    Ok(out)
}

/// All of `S_n`, materialized.
pub fn all_permutations(n: u64) -> Result<Vec<Permutation>, LabError> {
    let mut out = Vec::new();
    for_each_permutation(n, |p| out.push(p.clone()))?;
    Ok(out)
}

fn check_queries(n: u64, queries: &[BasicQuery]) -> Result<(), LabError> {
    for q in queries {
        if q.x >= n {
            return Err(LabError::Oracle(OracleError::QueryOutOfRange { x: q.x, n }));
        }
    }
    Ok(())
}

/// Exact response distribution of the query sequence against a uniformly
/// random member of `perms` (enumeration route).
pub fn response_distribution_over(
    perms: &[Permutation],
    queries: &[BasicQuery],
) -> ResponseDistribution {
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for p in perms {
        let inv = p.inverse();
        let responses: Vec<u64> = queries
            .iter()
            .map(|q| match q.dir {
                Direction::Forward => p.apply(q.x),
                Direction::Backward => inv.apply(q.x),
            })
            .collect();
        *counts.entry(responses).or_default() += 1;
    }
    let total = BigInt::from(perms.len());
    counts
        .into_iter()
        .map(|(k, c)| (k, BigRational::new(BigInt::from(c), total.clone())))
        .collect()
}

/// Exact response distribution of the lazy oracle core (expansion route):
/// every uniform component choice is branched with its exact probability.
/// `include_own = false` is the cyclus sampler, `true` the permutation
/// sampler.
pub fn lazy_response_distribution(
    n: u64,
    include_own: bool,
    queries: &[BasicQuery],
) -> Result<ResponseDistribution, LabError> {
    check_queries(n, queries)?;
    let core = LazyCore::new(n, include_own)?;
    let mut out = ResponseDistribution::new();
    let mut responses = Vec::with_capacity(queries.len());
    expand(&core, queries, &mut responses, BigRational::one(), &mut out);
    Ok(out)
}

fn expand(
    core: &LazyCore,
    remaining: &[BasicQuery],
    responses: &mut Vec<u64>,
    prob: BigRational,
    out: &mut ResponseDistribution,
) {
    let Some((&q, rest)) = remaining.split_first() else {
        let slot = out
            .entry(responses.clone())
            .or_insert_with(BigRational::zero);
        *slot += prob;
        return;
    };
    if let Some(y) = core.replay(q) {
        responses.push(y);
        expand(core, rest, responses, prob, out);
        responses.pop();
        return;
    }
    let count = core.choice_count(q);
    let branch_prob = prob / BigInt::from(count);
    for choice in 0..count {
        let mut next = core.clone();
        let y = next.respond_with_choice(q, choice);
        responses.push(y);
        expand(&next, rest, responses, branch_prob.clone(), out);
        responses.pop();
    }
}

fn factorial(n: u64) -> BigInt {
    (2..=n).map(BigInt::from).fold(BigInt::one(), |a, b| a * b)
}

/// Exact probability of a fixed nonrepeating length-`k` transcript against a
/// uniformly random cyclus: `(n-k-1)!/(n-1)!`. A length-`n` transcript ends
/// with the forced cyclus-closing answer, which contributes no factor, so it
/// keeps the `k = n-1` value.
pub fn cyclus_transcript_probability(n: u64, k: u64) -> BigRational {
    let merges = k.min(n - 1);
    BigRational::new(factorial(n - merges - 1), factorial(n - 1))
}

/// Exact probability of a fixed nonrepeating length-`k` transcript against a
/// uniformly random permutation: `(n-k)!/n!`.
pub fn perm_transcript_probability(n: u64, k: u64) -> BigRational {
    BigRational::new(factorial(n - k), factorial(n))
}

/// If the transcript is nonrepeating (every query reveals a fresh edge),
/// returns its length; otherwise `None`.
pub fn nonrepeating_transcript_len(
    n: u64,
    queries: &[BasicQuery],
    responses: &[u64],
) -> Option<u64> {
    let mut g = PartialPermGraph::new(n).ok()?;
    for (q, &y) in queries.iter().zip(responses) {
        let known = match q.dir {
            Direction::Forward => g.successor(q.x).is_some(),
            Direction::Backward => g.predecessor(q.x).is_some(),
        };
        if known {
            return None;
        }
        let (from, to) = match q.dir {
            Direction::Forward => (q.x, y),
            Direction::Backward => (y, q.x),
        };
        g.add_edge(from, to).ok()?;
    }
    Some(queries.len() as u64)
}

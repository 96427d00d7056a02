//! Built-in distinguisher strategies.

use crate::graph::{EdgeEffect, PartialPermGraph};
use crate::lab::{Distinguisher, LabError};
use crate::oracle::{Direction, OracleHandle, OracleRng};
use crate::perm::prime_factors;

/// How the nonrepeating detector walks the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryPolicy {
    /// Always extend the current chain forward from its tail.
    Forward,
    /// Alternate between extending the tail forward and the head backward.
    Alternating,
}

/// Issues a fixed budget of nonrepeating basic queries, mirrors the answers
/// in a partial permutation graph, and guesses 1 exactly when some answer
/// closed a cycle. Any nonrepeating policy achieves the same advantage;
/// two are provided so that can be checked.
#[derive(Clone, Copy, Debug)]
pub struct NonrepeatingCycleDetector {
    budget: u64,
    policy: QueryPolicy,
}

impl NonrepeatingCycleDetector {
    pub fn new(budget: u64) -> Self {
        Self {
            budget,
            policy: QueryPolicy::Forward,
        }
    }

    pub fn with_policy(budget: u64, policy: QueryPolicy) -> Self {
        Self { budget, policy }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }
}

impl Distinguisher for NonrepeatingCycleDetector {
    fn name(&self) -> &'static str {
        match self.policy {
            QueryPolicy::Forward => "nonrep",
            QueryPolicy::Alternating => "nonrep-mixed",
        }
    }

    fn run(&self, oracle: &mut OracleHandle, _rng: &mut OracleRng) -> Result<bool, LabError> {
        let n = oracle.n();
        if self.budget >= n {
            return Err(LabError::BudgetTooLarge { m: self.budget, n });
        }
        let mut mirror = PartialPermGraph::new(n)?;
        let mut saw_cycle = false;
        // (head, tail) of the chain currently being extended.
        let mut chain: Option<(u64, u64)> = None;
        let mut probe = 0u64;
        for step in 0..self.budget {
            let (head, tail) = match chain {
                Some(c) => c,
                None => {
                    while mirror.has_edges_at(probe) {
                        probe += 1;
                    }
                    (probe, probe)
                }
            };
            let backward = self.policy == QueryPolicy::Alternating && step % 2 == 1;
            let effect;
            if backward {
                let z = oracle.query_basic(head, Direction::Backward)?;
                effect = mirror.add_edge(z, head)?;
                chain = Some((z, tail));
            } else {
                let y = oracle.query_basic(tail, Direction::Forward)?;
                effect = mirror.add_edge(tail, y)?;
                chain = Some((head, y));
            }
            if effect == EdgeEffect::ClosedCycle {
                saw_cycle = true;
                chain = None;
            }
        }
        Ok(saw_cycle)
    }
}

/// One power query `(0, n)`: guesses "cyclus" exactly when the answer is 0,
/// i.e. when the cycle length of 0 divides `n`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SingleQueryCyclusTest;

impl Distinguisher for SingleQueryCyclusTest {
    fn name(&self) -> &'static str {
        "single-query"
    }

    fn run(&self, oracle: &mut OracleHandle, _rng: &mut OracleRng) -> Result<bool, LabError> {
        let n = oracle.n();
        let m = i64::try_from(n).map_err(|_| LabError::ExponentOverflow { n })?;
        Ok(oracle.query_pow(0, m)? == 0)
    }
}

/// One power query `(0, n/p)` per distinct prime `p` of `n` plus the final
/// `(0, n)`: guesses 1 exactly when the cycle of 0 has length exactly `n`,
/// which for a permutation happens exactly when it is a cyclus. Always
/// issues all of its queries.
#[derive(Clone, Copy, Debug, Default)]
pub struct PrimeQuotientCyclusTest;

impl Distinguisher for PrimeQuotientCyclusTest {
    fn name(&self) -> &'static str {
        "prime-quotient"
    }

    fn run(&self, oracle: &mut OracleHandle, _rng: &mut OracleRng) -> Result<bool, LabError> {
        let n = oracle.n();
        let m = i64::try_from(n).map_err(|_| LabError::ExponentOverflow { n })?;
        let mut all_moved = true;
        for (p, _) in prime_factors(n) {
            let r = oracle.query_pow(0, m / p as i64)?;
            all_moved &= r != 0;
        }
        let back_home = oracle.query_pow(0, m)? == 0;
        Ok(all_moved && back_home)
    }
}

/// Queries `(i, exponent)` for `i < points` and guesses 1 when some point is
/// fixed by that power, i.e. its cycle length divides the exponent. Effective
/// when the hidden permutation concentrates mass on cycles of a known length.
#[derive(Clone, Copy, Debug)]
pub struct LargestCycleProbe {
    pub exponent: i64,
    pub points: u64,
}

impl Distinguisher for LargestCycleProbe {
    fn name(&self) -> &'static str {
        "largest-cycle"
    }

    fn run(&self, oracle: &mut OracleHandle, _rng: &mut OracleRng) -> Result<bool, LabError> {
        let n = oracle.n();
        if self.points > n {
            return Err(LabError::PointsExceedDomain { k: self.points, n });
        }
        let mut hit = false;
        for i in 0..self.points {
            hit |= oracle.query_pow(i, self.exponent)? == i;
        }
        Ok(hit)
    }
}

/// Makes no queries and always guesses 0.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstantZero;

impl Distinguisher for ConstantZero {
    fn name(&self) -> &'static str {
        "const-zero"
    }

    fn run(&self, _oracle: &mut OracleHandle, _rng: &mut OracleRng) -> Result<bool, LabError> {
        Ok(false)
    }
}

//! The distinguishing game: a strategy queries one of two oracle families
//! and guesses which one it is talking to; the runner estimates its
//! advantage over many independent trials.

use rand::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::lab::LabError;
use crate::oracle::{OracleError, OracleHandle, OracleRng};

/// A query strategy with a final 0/1 guess. Implementations must be
/// stateless across trials; all per-trial state lives inside `run`.
pub trait Distinguisher: Sync {
    fn name(&self) -> &'static str;

    /// Plays one session against a fresh oracle and returns the guess bit.
    fn run(&self, oracle: &mut OracleHandle, rng: &mut OracleRng) -> Result<bool, LabError>;
}

/// Empirical advantage of a strategy between two oracle families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdvantageEstimate {
    pub trials_per_side: u64,
    /// Frequency of guess 1 against oracle A.
    pub p_a: f64,
    /// Frequency of guess 1 against oracle B.
    pub p_b: f64,
    /// `|p_a - p_b|`.
    pub advantage: f64,
    /// Three-sigma halfwidth under the normal approximation.
    pub ci_halfwidth: f64,
}

impl AdvantageEstimate {
    fn from_counts(ones_a: u64, ones_b: u64, trials: u64) -> Self {
        let t = trials as f64;
        let p_a = ones_a as f64 / t;
        let p_b = ones_b as f64 / t;
        let ci_halfwidth = 3.0 * ((p_a * (1.0 - p_a) / t) + (p_b * (1.0 - p_b) / t)).sqrt();
        Self {
            trials_per_side: trials,
            p_a,
            p_b,
            advantage: (p_a - p_b).abs(),
            ci_halfwidth,
        }
    }
}

/// Derives the rng for one (trial, side, purpose) cell of a game from the
/// master seed. Every cell is an independent stream of one generator, so
/// results do not depend on scheduling or worker count.
pub fn trial_rng(seed: u64, trial: u64, side: u8, purpose: u8) -> OracleRng {
    let mut rng = OracleRng::seed_from_u64(seed);
    rng.set_stream(trial * 4 + side as u64 * 2 + purpose as u64);
    rng
}

/// Runs `trials` independent sessions of `d` against fresh instances of each
/// oracle family and estimates the advantage. With `jobs > 1`, trials run in
/// a worker pool; the per-trial seeding makes the result identical to the
/// sequential run.
pub fn run_game<A, B, D>(
    make_a: &A,
    make_b: &B,
    d: &D,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<AdvantageEstimate, LabError>
where
    A: Fn(OracleRng) -> Result<OracleHandle, OracleError> + Sync + ?Sized,
    B: Fn(OracleRng) -> Result<OracleHandle, OracleError> + Sync + ?Sized,
    D: Distinguisher + ?Sized,
{
    if trials == 0 {
        return Err(LabError::ZeroTrials);
    }
    let one_trial = |t: u64| -> Result<(u64, u64), LabError> {
        let mut oracle_a = make_a(trial_rng(seed, t, 0, 0))?;
        let bit_a = d.run(&mut oracle_a, &mut trial_rng(seed, t, 0, 1))?;
        let mut oracle_b = make_b(trial_rng(seed, t, 1, 0))?;
        let bit_b = d.run(&mut oracle_b, &mut trial_rng(seed, t, 1, 1))?;
        Ok((bit_a as u64, bit_b as u64))
    };

    let (ones_a, ones_b) = if jobs <= 1 {
        let mut acc = (0u64, 0u64);
        for t in 0..trials {
            let (a, b) = one_trial(t)?;
            acc.0 += a;
            acc.1 += b;
        }
        acc
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("worker pool construction");
        pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(one_trial)
                .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
        })?
    };
    Ok(AdvantageEstimate::from_counts(ones_a, ones_b, trials))
}

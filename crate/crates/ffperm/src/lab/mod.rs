//! Distinguisher strategies, the Monte-Carlo game runner that estimates
//! advantages, and exact-distribution comparisons between oracle pairs.

mod equiv;
mod game;
mod stats;
mod strategies;

use thiserror::Error;

use crate::ccl::CclError;
use crate::graph::GraphError;
use crate::oracle::OracleError;
use crate::perm::PermError;

pub use equiv::{
    all_cycluses, all_permutations, cyclus_transcript_probability, lazy_response_distribution,
    nonrepeating_transcript_len, perm_transcript_probability, response_distribution_over,
};
pub use game::{run_game, trial_rng, AdvantageEstimate, Distinguisher};
pub use stats::{
    binomial_3sigma, chi_square_3sigma_threshold, chi_square_uniform, empirical_from_counts,
    rational_to_f64, tv_distance,
};
pub use strategies::{
    ConstantZero, LargestCycleProbe, NonrepeatingCycleDetector, PrimeQuotientCyclusTest,
    QueryPolicy, SingleQueryCyclusTest,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Ccl(#[from] CclError),
    #[error("query budget {m} must be below the domain size {n}")]
    BudgetTooLarge { m: u64, n: u64 },
    #[error("probe count {k} exceeds the domain size {n}")]
    PointsExceedDomain { k: u64, n: u64 },
    #[error("at least one trial per side is required")]
    ZeroTrials,
    #[error("domain size {n} does not fit a signed 64-bit exponent")]
    ExponentOverflow { n: u64 },
    #[error("distribution sums to {total}, not 1")]
    NotNormalized { total: f64 },
}

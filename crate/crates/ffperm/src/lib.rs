//! Fast-forward permutations and the machinery to test them.
//!
//! A permutation is *fast-forward* when `P^m(x)` evaluates in time
//! independent of `m` and `x`. This crate provides:
//!
//! * [`perm`]: explicit permutations, cycle decomposition, conjugation, and
//!   divisor-counting helpers;
//! * [`graph`]: partial permutation graphs with union-find component
//!   tracking, the engine behind lazy sampling;
//! * [`ccl`]: direct sampling of a random permutation's ordered cycle
//!   structure, its truncated variant, and the exact tail bounds;
//! * [`ff`]: permutations coded by a cycle-length sequence with O(log l)
//!   power evaluation, and conjugated evaluation around a hidden bijection;
//! * [`prng`]: a keyed small-domain permutation (Feistel + cycle walking)
//!   and counter-mode number derivation;
//! * [`oracle`]: stateful query oracles over hidden permutations, either
//!   materialized or lazily sampled, behind one handle type;
//! * [`lab`]: distinguisher strategies, the Monte-Carlo game runner, and
//!   exact response-distribution comparisons.
//!
//! ```
//! use ffperm::ff::FFPerm;
//!
//! // Blocks of lengths 1, 2, 4 over {0, …, 6}.
//! let pi = FFPerm::from_lengths(&[1, 2, 4]).unwrap();
//! assert_eq!(pi.eval_pow(4, 5).unwrap(), 5);
//! assert_eq!(pi.eval_pow(4, -1_000_000_000).unwrap(), 4);
//! ```

pub mod ccl;
pub mod ff;
pub mod graph;
pub mod lab;
pub mod oracle;
pub mod perm;
pub mod prng;

pub use ccl::CycleLengths;
pub use ff::FFPerm;
pub use lab::{run_game, AdvantageEstimate, Distinguisher};
pub use oracle::{BasicQuery, Direction, FFQuery, OracleHandle, OracleRng, Query};
pub use perm::Permutation;
pub use prng::KeyedPerm;

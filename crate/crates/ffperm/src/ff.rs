//! Permutations whose powers evaluate in O(log l) time.
//!
//! A cycle-length sequence `(a_0, …, a_{l-1})` summing to `n` codes the
//! permutation that cyclically shifts each block `[s_{i-1}, s_i)` of the
//! domain by one, where `s_i` are the prefix sums. Any power of that
//! permutation at any point is a binary search for the block followed by one
//! modular shift, so the cost is independent of both the exponent and the
//! point.

use thiserror::Error;

use crate::ccl::CycleLengths;
use crate::perm::{self, Permutation, MAX_MATERIALIZED_N};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("element {x} is outside the domain of size {n}")]
    XOutOfRange { x: u64, n: u64 },
    #[error("domain size {n} exceeds the materialization cap {max}")]
    DomainTooLarge { n: u64, max: u64 },
}

/// A fast-forward permutation, stored as the strictly increasing prefix sums
/// of its block lengths; the last entry is the domain size. The block lengths
/// themselves play no role in evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFPerm {
    prefix: Vec<u64>,
}

impl FFPerm {
    /// Preprocesses a cycle-length code into prefix sums in O(l).
    pub fn from_code(code: &CycleLengths) -> Self {
        Self {
            prefix: code.prefix_sums(),
        }
    }

    /// Convenience wrapper validating a raw length sequence.
    pub fn from_lengths(lengths: &[u64]) -> Result<Self, crate::ccl::CclError> {
        Ok(Self::from_code(&CycleLengths::new(lengths.to_vec())?))
    }

    pub fn n(&self) -> u64 {
        *self.prefix.last().expect("prefix is nonempty")
    }

    pub fn block_count(&self) -> usize {
        self.prefix.len()
    }

    pub fn prefix_sums(&self) -> &[u64] {
        &self.prefix
    }

    /// Recovers the coding lengths.
    pub fn lengths(&self) -> CycleLengths {
        let mut prev = 0;
        let lengths = self
            .prefix
            .iter()
            .map(|&s| {
                let a = s - prev;
                prev = s;
                a
            })
            .collect();
        CycleLengths::new(lengths).expect("prefix sums are strictly increasing")
    }

    /// `π^m(x)`: binary search for the block holding `x`, then shift the
    /// offset by `m` modulo the block length. 128-bit intermediates keep the
    /// arithmetic exact for any `i64` exponent and domains up to 2^63.
    pub fn eval_pow(&self, x: u64, m: i64) -> Result<u64, FfError> {
        let n = self.n();
        if x >= n {
            return Err(FfError::XOutOfRange { x, n });
        }
        // Least index with x < prefix[i]; the block is [start, prefix[i]).
        let i = self.prefix.partition_point(|&s| s <= x);
        let start = if i == 0 { 0 } else { self.prefix[i - 1] };
        let len = self.prefix[i] - start;
        let offset = ((x - start) as i128 + m as i128).rem_euclid(len as i128) as u64;
        Ok(start + offset)
    }

    /// `π(x)`.
    pub fn eval(&self, x: u64) -> Result<u64, FfError> {
        self.eval_pow(x, 1)
    }

    /// Materializes the coded permutation; its ordered cycle structure equals
    /// the coding lengths.
    pub fn to_explicit(&self) -> Result<Permutation, FfError> {
        let n = self.n();
        if n > MAX_MATERIALIZED_N {
            return Err(FfError::DomainTooLarge {
                n,
                max: MAX_MATERIALIZED_N,
            });
        }
        let image = (0..n)
            .map(|x| self.eval_pow(x, 1).expect("x < n"))
            .collect();
        Ok(perm::from_trusted_image(image))
    }
}

/// `P(π^m(P⁻¹(x)))` for a pair of mutually inverse bijection callbacks:
/// exactly one `inverse` call and one `forward` call per evaluation. The
/// composite permutation has the same cycle-length multiset as `π`.
pub fn conjugated_eval<E: From<FfError>>(
    ff: &FFPerm,
    x: u64,
    m: i64,
    forward: impl FnOnce(u64) -> Result<u64, E>,
    inverse: impl FnOnce(u64) -> Result<u64, E>,
) -> Result<u64, E> {
    let z = inverse(x)?;
    let w = ff.eval_pow(z, m)?;
    forward(w)
}

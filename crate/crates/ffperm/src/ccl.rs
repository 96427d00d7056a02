//! Sampling the ordered cycle structure of a random permutation without
//! materializing the permutation.
//!
//! The sampler draws cut points `0 < s_0 < s_1 < … = n` by choosing each
//! `s_i` uniformly from `{s_{i-1}+1, …, n}` until `n` is hit; the successive
//! differences are distributed exactly like the ordered cycle structure of a
//! uniform random permutation of `{0, …, n-1}`. A truncated variant caps the
//! number of draws and force-closes the final block, with an explicit tail
//! bound on how often the cap binds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use thiserror::Error;

use crate::perm::{for_each_permutation, PermError};

/// Largest domain for the factorial-enumeration distribution oracle.
pub const MAX_EXACT_OCS_N: u64 = 9;

/// Largest domain for the recursive exact sampler distribution (2^(n-1) keys).
pub const MAX_EXACT_CCL_N: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CclError {
    #[error("domain size must be at least 1")]
    ZeroDomain,
    #[error("cycle-length sequence must be nonempty")]
    EmptyLengths,
    #[error("cycle lengths must be positive")]
    ZeroLength,
    #[error("cycle-length sum overflows u64")]
    SumOverflow,
    #[error("truncation length must be at least 1")]
    ZeroTruncation,
    #[error("exact distribution for n={n} not supported (cap {max})")]
    ExactTooLarge { n: u64, max: u64 },
    #[error("tail bound index l={l} must be at most n-1={max}")]
    IndexOutOfRange { l: u64, max: u64 },
    #[error("tail bound threshold m={m} must be in 1..n={n}")]
    ThresholdOutOfRange { m: u64, n: u64 },
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A sequence of positive cycle lengths summing to `n`. Order is significant:
/// entry `i` is the length of the cycle containing the smallest element not
/// covered by earlier cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleLengths {
    lengths: Vec<u64>,
}

impl CycleLengths {
    pub fn new(lengths: Vec<u64>) -> Result<Self, CclError> {
        if lengths.is_empty() {
            return Err(CclError::EmptyLengths);
        }
        let mut sum: u64 = 0;
        for &a in &lengths {
            if a == 0 {
                return Err(CclError::ZeroLength);
            }
            sum = sum.checked_add(a).ok_or(CclError::SumOverflow)?;
        }
        Ok(Self { lengths })
    }

    pub fn n(&self) -> u64 {
        self.lengths.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lengths(&self) -> &[u64] {
        &self.lengths
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.lengths
    }

    /// Partial sums `s_0 < s_1 < … = n`.
    pub fn prefix_sums(&self) -> Vec<u64> {
        let mut acc = 0;
        self.lengths
            .iter()
            .map(|&a| {
                acc += a;
                acc
            })
            .collect()
    }
}

/// Source of one bounded draw per sampler step: a value in `[0, bound)`.
///
/// The true-random sampler draws uniformly from an rng; the keyed oracle
/// derives the draws from counter-mode evaluations of a keyed permutation.
pub trait StepSource {
    fn sample_below(&mut self, bound: u64) -> u64;
}

/// Adapts any rng into a uniform [`StepSource`].
pub struct RngSource<'a, R: Rng>(pub &'a mut R);

impl<R: Rng> StepSource for RngSource<'_, R> {
    fn sample_below(&mut self, bound: u64) -> u64 {
        self.0.random_range(0..bound)
    }
}

/// Samples an ordered cycle structure for domain size `n`.
pub fn ccl(n: u64, rng: &mut impl Rng) -> Result<CycleLengths, CclError> {
    ccl_with(n, &mut RngSource(rng))
}

pub fn ccl_with(n: u64, source: &mut impl StepSource) -> Result<CycleLengths, CclError> {
    if n == 0 {
        return Err(CclError::ZeroDomain);
    }
    let mut lengths = Vec::new();
    let mut s = 0u64;
    while s < n {
        let step = 1 + source.sample_below(n - s);
        lengths.push(step);
        s += step;
    }
    Ok(CycleLengths { lengths })
}

/// Truncated sampler: runs at most `l - 1` draws; if the sequence has not
/// reached `n` by then, the final block is force-closed at `n`. Output has at
/// most `l` entries and always sums to `n`.
pub fn truncated_ccl(n: u64, l: u64, rng: &mut impl Rng) -> Result<CycleLengths, CclError> {
    truncated_ccl_with(n, l, &mut RngSource(rng))
}

pub fn truncated_ccl_with(
    n: u64,
    l: u64,
    source: &mut impl StepSource,
) -> Result<CycleLengths, CclError> {
    if n == 0 {
        return Err(CclError::ZeroDomain);
    }
    if l == 0 {
        return Err(CclError::ZeroTruncation);
    }
    let mut lengths = Vec::new();
    let mut s = 0u64;
    for _ in 0..l - 1 {
        let step = 1 + source.sample_below(n - s);
        lengths.push(step);
        s += step;
        if s == n {
            return Ok(CycleLengths { lengths });
        }
    }
    lengths.push(n - s);
    Ok(CycleLengths { lengths })
}

fn factorial_big(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Exact distribution of the ordered cycle structure over `S_n`, computed by
/// enumerating all `n!` permutations. Probabilities are exact rationals
/// summing to 1.
pub fn ocs_exact_distribution(n: u64) -> Result<BTreeMap<CycleLengths, BigRational>, CclError> {
    if n == 0 {
        return Err(CclError::ZeroDomain);
    }
    if n > MAX_EXACT_OCS_N {
        return Err(CclError::ExactTooLarge {
            n,
            max: MAX_EXACT_OCS_N,
        });
    }
    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for_each_permutation(n, |p| {
        *counts.entry(p.ocs()).or_default() += 1;
    })?;
    let total = factorial_big(n);
    Ok(counts
        .into_iter()
        .map(|(lengths, c)| {
            (
                CycleLengths { lengths },
                BigRational::new(BigInt::from(c), total.clone()),
            )
        })
        .collect())
}

/// Exact distribution of the sampler's output, computed by recursing over its
/// uniform draws with rational arithmetic. Independent of the enumeration in
/// [`ocs_exact_distribution`], which it must match entry for entry.
pub fn ccl_exact_distribution(n: u64) -> Result<BTreeMap<CycleLengths, BigRational>, CclError> {
    if n == 0 {
        return Err(CclError::ZeroDomain);
    }
    if n > MAX_EXACT_CCL_N {
        return Err(CclError::ExactTooLarge {
            n,
            max: MAX_EXACT_CCL_N,
        });
    }
    let mut out = BTreeMap::new();
    let mut prefix = Vec::new();
    fn rec(
        n: u64,
        s: u64,
        prob: BigRational,
        prefix: &mut Vec<u64>,
        out: &mut BTreeMap<CycleLengths, BigRational>,
    ) {
        let remaining = n - s;
        let step_prob = prob / BigInt::from(remaining);
        for step in 1..=remaining {
            prefix.push(step);
            if s + step == n {
                out.insert(
                    CycleLengths {
                        lengths: prefix.clone(),
                    },
                    step_prob.clone(),
                );
            } else {
                rec(n, s + step, step_prob.clone(), prefix, out);
            }
            prefix.pop();
        }
    }
    rec(n, 0, BigRational::one(), &mut prefix, &mut out);
    Ok(out)
}

/// Parameters for [`tail_bound`]: domain size `n`, draw index `l`, and
/// threshold `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TailBoundParams {
    pub n: u64,
    pub l: u64,
    pub m: u64,
}

impl TailBoundParams {
    pub fn new(n: u64, l: u64, m: u64) -> Result<Self, CclError> {
        if n == 0 {
            return Err(CclError::ZeroDomain);
        }
        if l > n - 1 {
            return Err(CclError::IndexOutOfRange { l, max: n - 1 });
        }
        if m == 0 || m > n {
            return Err(CclError::ThresholdOutOfRange { m, n });
        }
        Ok(Self { n, l, m })
    }
}

/// Upper bound on the probability that the sampler's `l`-th cut point is
/// still below `m`: `(m/n) · |ln(1 - m/n)|^l / l!`, evaluated in log space so
/// large `l` does not overflow. `m = n` is rejected (the logarithm diverges).
pub fn tail_bound(params: &TailBoundParams) -> Result<f64, CclError> {
    // Revalidate: the fields are public, so the params need not have come
    // through the checked constructor.
    let TailBoundParams { n, l, m } = TailBoundParams::new(params.n, params.l, params.m)?;
    if m == n {
        return Err(CclError::ThresholdOutOfRange { m, n });
    }
    let ratio = m as f64 / n as f64;
    if l == 0 {
        return Ok(ratio);
    }
    let lambda = -(1.0 - ratio).ln();
    let mut log_bound = ratio.ln() + l as f64 * lambda.ln();
    for k in 1..=l {
        log_bound -= (k as f64).ln();
    }
    Ok(log_bound.exp())
}

/// The root `c` of `c (ln c - 1) = 1`, the growth constant governing how fast
/// the truncation tail vanishes. Bisected to 1e-9; lies in (3.5911, 3.5912).
pub fn runtime_tail_constant() -> f64 {
    let f = |c: f64| c * (c.ln() - 1.0) - 1.0;
    let (mut lo, mut hi) = (std::f64::consts::E, 4.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = 0.5 * (lo + hi);
    assert!(c > 3.5911 && c < 3.5912);
    c
}

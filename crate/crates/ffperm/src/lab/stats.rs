//! Small statistical utilities for the test harness: total-variation
//! distance, chi-square uniformity statistics, and binomial error bars.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::lab::LabError;

const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Total-variation distance `½ Σ |a - b|` between two finite distributions
/// over a common ordered support. Both inputs must sum to 1 (within 1e-9).
pub fn tv_distance<K: Ord>(a: &BTreeMap<K, f64>, b: &BTreeMap<K, f64>) -> Result<f64, LabError> {
    for dist in [a, b] {
        let total: f64 = dist.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(LabError::NotNormalized { total });
        }
    }
    let mut sum = 0.0;
    for (k, pa) in a {
        let pb = b.get(k).copied().unwrap_or(0.0);
        sum += (pa - pb).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb.abs();
        }
    }
    Ok(sum / 2.0)
}

/// Chi-square statistic of observed counts against the uniform distribution.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Acceptance threshold for a chi-square statistic with `bins - 1` degrees
/// of freedom: mean plus three standard deviations of the chi-square
/// distribution.
pub fn chi_square_3sigma_threshold(bins: usize) -> f64 {
    let df = (bins - 1) as f64;
    df + 3.0 * (2.0 * df).sqrt()
}

/// Three standard deviations of a Binomial(trials, p) count.
pub fn binomial_3sigma(trials: u64, p: f64) -> f64 {
    3.0 * (trials as f64 * p * (1.0 - p)).sqrt()
}

/// Converts an exact rational distribution to floating point.
pub fn rational_to_f64<K: Ord + Clone>(dist: &BTreeMap<K, BigRational>) -> BTreeMap<K, f64> {
    dist.iter()
        .map(|(k, v)| (k.clone(), v.to_f64().expect("probability fits in f64")))
        .collect()
}

/// Normalizes sample counts into an empirical distribution.
pub fn empirical_from_counts<K: Ord + Clone>(
    counts: &BTreeMap<K, u64>,
    total: u64,
) -> BTreeMap<K, f64> {
    counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / total as f64))
        .collect()
}

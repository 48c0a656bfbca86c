//! Pairwise similarity metrics over feature vectors and password lists.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::corpus::PasswordMultiset;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Cosine,
    Jaccard,
    GeneralizedJaccard,
}

/// A metric value, always in [0, 1]: cosine inputs are nonnegative vectors,
/// so the usual [-1, 1] angle bound tightens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similarity {
    pub metric: Metric,
    pub value: f64,
}

/// Cosine similarity of two feature vectors of the same shape.
pub fn cosine(u: &FeatureVector, v: &FeatureVector) -> Result<Similarity> {
    if u.weights().len() != v.weights().len() {
        return Err(Error::DimensionMismatch {
            left: u.weights().len(),
            right: v.weights().len(),
        });
    }
    let mut dot = 0.0;
    let mut norm_u = 0.0;
    let mut norm_v = 0.0;
    for (a, b) in u.weights().iter().zip(v.weights()) {
        dot += a * b;
        norm_u += a * a;
        norm_v += b * b;
    }
    if norm_u == 0.0 || norm_v == 0.0 {
        return Err(Error::Domain("cosine similarity of a zero vector".into()));
    }
    // sqrt of the product (not the product of sqrts) so that identical
    // vectors come out at exactly 1.0.
    let value = (dot / (norm_u * norm_v).sqrt()).clamp(0.0, 1.0);
    Ok(Similarity { metric: Metric::Cosine, value })
}

/// Plain Jaccard index of two password sets, |a n b| / |a u b|.
pub fn jaccard(a: &HashSet<&str>, b: &HashSet<&str>) -> Result<Similarity> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::Domain("jaccard of two empty sets".into()));
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let intersection = small.iter().filter(|w| large.contains(*w)).count();
    let union = a.len() + b.len() - intersection;
    let value = intersection as f64 / union as f64;
    Ok(Similarity { metric: Metric::Jaccard, value })
}

/// Generalized Jaccard index of two multisets: sum of per-password minimum
/// counts over sum of maximums.
///
/// The minimum sum only needs the smaller support (the minimum vanishes
/// outside either support), and the maximum sum never needs computing at all:
/// sum(min) + sum(max) = |A| + |B|. Count arithmetic stays in integers; the
/// final division is the only floating-point step.
pub fn generalized_jaccard(a: &PasswordMultiset, b: &PasswordMultiset) -> Result<Similarity> {
    let min_sum = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let (small, large) =
                if a.unique() <= b.unique() { (a, b) } else { (b, a) };
            small
                .entries()
                .par_iter()
                .map(|(pw, &c)| c.min(large.count(pw)))
                .sum::<u64>()
        }
        #[cfg(not(feature = "parallel"))]
        {
            min_count_sum_seq(a, b)
        }
    };
    finish_generalized_jaccard(min_sum, a.total(), b.total())
}

/// Sequential reference path for [`generalized_jaccard`].
#[doc(hidden)]
pub fn generalized_jaccard_seq(a: &PasswordMultiset, b: &PasswordMultiset) -> Result<Similarity> {
    finish_generalized_jaccard(min_count_sum_seq(a, b), a.total(), b.total())
}

fn min_count_sum_seq(a: &PasswordMultiset, b: &PasswordMultiset) -> u64 {
    let (small, large) = if a.unique() <= b.unique() { (a, b) } else { (b, a) };
    small.iter().map(|(pw, c)| c.min(large.count(pw))).sum()
}

pub(crate) fn finish_generalized_jaccard(
    min_sum: u64,
    total_a: u64,
    total_b: u64,
) -> Result<Similarity> {
    if total_a == 0 && total_b == 0 {
        return Err(Error::Domain("generalized jaccard of two empty multisets".into()));
    }
    let max_sum = (total_a as u128 + total_b as u128) - min_sum as u128;
    let value = min_sum as f64 / max_sum as f64;
    Ok(Similarity { metric: Metric::GeneralizedJaccard, value })
}

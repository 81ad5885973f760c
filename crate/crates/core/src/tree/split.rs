//! Exhaustive Gini split search.
//!
//! Candidate scores are compared in exact integer arithmetic. For a split with
//! left/right sizes `nl`, `nr` and per-side sums of squared class counts `a`, `b`,
//! the weighted child impurity is `1 - (a/nl + b/nr)/n`, so maximizing the
//! decrease means maximizing `a/nl + b/nr`. Comparing those fractions by
//! cross-multiplication in `u128` makes ties exact, which keeps the
//! (lowest feature, lowest threshold) tie rule independent of rounding.
//! Exactness holds while `n^5 < 2^128`, i.e. nodes below ~4e7 samples.

use std::cmp::Ordering;

use crate::dataset::Dataset;

/// A chosen axis-aligned split. Samples with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent Gini minus the size-weighted Gini of the two children.
    pub impurity_decrease: f64,
}

/// Score `num / den` of a candidate, where `num / den = a/nl + b/nr`.
#[derive(Debug, Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(a: u64, nl: u64, b: u64, nr: u64) -> Self {
        Score {
            num: a as u128 * nr as u128 + b as u128 * nl as u128,
            den: nl as u128 * nr as u128,
        }
    }

    fn cmp(&self, other: &Score) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Reusable buffers for repeated split searches.
#[derive(Debug, Default)]
pub(crate) struct SplitSearcher {
    pairs: Vec<(f64, usize)>,
    left: Vec<u64>,
    right: Vec<u64>,
}

impl SplitSearcher {
    /// Best split of `indices` over `features` (which must be ascending), or
    /// `None` when no threshold strictly lowers the impurity.
    pub(crate) fn search(
        &mut self,
        data: &Dataset,
        indices: &[usize],
        features: &[usize],
        parent_counts: &[u64],
    ) -> Option<Split> {
        let n = indices.len() as u64;
        if n < 2 {
            return None;
        }
        let parent_sq: u64 = parent_counts.iter().map(|c| c * c).sum();
        if parent_sq == n * n {
            // pure
            return None;
        }

        let mut best: Option<(Score, usize, f64)> = None;
        for &feature in features {
            self.pairs.clear();
            self.pairs
                .extend(indices.iter().map(|&i| (data.value(i, feature), data.label(i))));
            self.pairs.sort_unstable_by(|x, y| x.0.total_cmp(&y.0));
            if self.pairs[0].0 == self.pairs[self.pairs.len() - 1].0 {
                continue;
            }

            self.left.clear();
            self.left.resize(parent_counts.len(), 0);
            self.right.clear();
            self.right.extend_from_slice(parent_counts);
            let mut a: u64 = 0;
            let mut b: u64 = parent_sq;

            for pos in 0..self.pairs.len() - 1 {
                let (value, label) = self.pairs[pos];
                a += 2 * self.left[label] + 1;
                b -= 2 * self.right[label] - 1;
                self.left[label] += 1;
                self.right[label] -= 1;

                let next = self.pairs[pos + 1].0;
                if value == next {
                    continue;
                }
                let nl = pos as u64 + 1;
                let score = Score::new(a, nl, b, n - nl);
                let better = match &best {
                    None => true,
                    Some((s, _, _)) => score.cmp(s) == Ordering::Greater,
                };
                if better {
                    best = Some((score, feature, midpoint(value, next)));
                }
            }
        }

        let (score, feature, threshold) = best?;
        // strictly positive decrease: score / n > parent_sq / n^2
        if score.num * n as u128 <= parent_sq as u128 * score.den {
            return None;
        }
        let nf = n as f64;
        let impurity_decrease = (score.num as f64 / score.den as f64) / nf - parent_sq as f64 / (nf * nf);
        Some(Split {
            feature,
            threshold,
            impurity_decrease,
        })
    }
}

/// Midpoint of two consecutive distinct sorted values, kept in `[lo, hi)` so the
/// `<=` routing rule reproduces the sorted partition.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo / 2.0 + hi / 2.0;
    if mid >= hi || mid < lo || !mid.is_finite() {
        lo
    } else {
        mid
    }
}

/// Best Gini split of the samples at `indices` over `candidate_features`.
///
/// Thresholds are midpoints between consecutive distinct sorted values.
/// Ties go to the lowest feature index, then the lowest threshold. Returns
/// `None` when the node is pure, every candidate feature is constant, or no
/// split strictly decreases impurity.
///
/// # Panics
///
/// If an index or feature is out of bounds.
pub fn best_split(data: &Dataset, indices: &[usize], candidate_features: &[usize]) -> Option<Split> {
    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();
    let mut counts = vec![0u64; data.n_classes()];
    for &i in indices {
        counts[data.label(i)] += 1;
    }
    SplitSearcher::default().search(data, indices, &features, &counts)
}

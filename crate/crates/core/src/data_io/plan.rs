//! Seeded batch and fold partitions.
//!
//! Permutations come from a Fisher-Yates shuffle driven by ChaCha8 seeded with
//! the given seed, so plans are identical on every platform.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::seeded;

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(seed));
    order
}

/// A shuffled ordering of `0..n` cut into consecutive batches. Only the last
/// batch may be shorter than `batch_size`; it is kept, not dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    ordering: Vec<usize>,
    batch_size: usize,
}

impl BatchPlan {
    pub fn new(n: usize, batch_size: usize, seed: u64) -> Result<Self> {
        if n == 0 || batch_size == 0 {
            return Err(Error::InvalidArgument(
                "batch plans need n >= 1 and batch_size >= 1".into(),
            ));
        }
        Ok(BatchPlan {
            ordering: permutation(n, seed),
            batch_size,
        })
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn n_batches(&self) -> usize {
        self.ordering.len().div_ceil(self.batch_size)
    }

    pub fn batch(&self, i: usize) -> &[usize] {
        let start = i * self.batch_size;
        let end = (start + self.batch_size).min(self.ordering.len());
        &self.ordering[start..end]
    }

    pub fn batches(&self) -> impl Iterator<Item = &[usize]> {
        self.ordering.chunks(self.batch_size)
    }

    /// Every index streamed up to and including batch `i`, in stream order.
    pub fn cumulative(&self, i: usize) -> &[usize] {
        let end = ((i + 1) * self.batch_size).min(self.ordering.len());
        &self.ordering[..end]
    }
}

/// Assignment of `0..n` to `k` folds whose sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles, then deals samples to folds round-robin.
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 || n < k {
            return Err(Error::InvalidArgument(format!(
                "cannot make {k} folds from {n} samples"
            )));
        }
        let mut assignment = vec![0; n];
        for (pos, i) in permutation(n, seed).into_iter().enumerate() {
            assignment[i] = pos % k;
        }
        Ok(FoldPlan { k, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Held-out indices of fold `f`, ascending.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == f)
            .collect()
    }

    /// Indices outside fold `f`, ascending.
    pub fn train_indices(&self, f: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != f)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

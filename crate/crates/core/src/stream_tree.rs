//! Decision trees that keep growing as new batches arrive.
//!
//! An update routes every sample of the batch to its current leaf, adds its
//! label to the class counts along the path, and then grows each touched leaf
//! (a "false root") with the ordinary recursive splitter, using only the
//! samples of the current batch that reached it. Existing internal nodes are
//! never revisited, so every earlier partition of feature space is preserved
//! and the new leaf regions refine the old ones.
//!
//! Old samples are not retained. A leaf's historical class counts still vote
//! at prediction time but take no part in choosing its new split.

use std::collections::BTreeMap;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};
use crate::tree::{DecisionTree, NodeId, SplitCriteria};

/// A [`DecisionTree`] extended in place by successive batches.
#[derive(Debug, Clone)]
pub struct StreamTree {
    pub(crate) tree: DecisionTree,
    pub(crate) rng: Rng,
    pub(crate) batches_seen: u64,
}

impl StreamTree {
    /// Fits the initial tree on `first_batch`, with class-count vectors of
    /// length `n_classes` even if some classes are absent from the batch.
    pub fn init(first_batch: &Dataset, n_classes: usize, criteria: &SplitCriteria, seed: u64) -> Result<Self> {
        let indices: Vec<usize> = (0..first_batch.n_samples()).collect();
        Self::init_indices(first_batch, indices, n_classes, criteria, seed)
    }

    pub(crate) fn init_indices(
        batch: &Dataset,
        indices: Vec<usize>,
        n_classes: usize,
        criteria: &SplitCriteria,
        seed: u64,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("first batch of a stream tree"));
        }
        if n_classes < 2 {
            return Err(Error::InvalidArgument("n_classes must be at least 2".into()));
        }
        batch.check_compatible(batch.n_features(), n_classes)?;
        let mut rng = seeded(seed);
        let tree = DecisionTree::fit_indices(batch, indices, n_classes, criteria, seed, &mut rng)?;
        Ok(StreamTree {
            tree,
            rng,
            batches_seen: 1,
        })
    }

    /// Extends the tree with one batch.
    ///
    /// On error (wrong feature count, label out of range, empty batch) the tree
    /// is left untouched.
    pub fn update(&mut self, batch: &Dataset) -> Result<()> {
        self.validate(batch)?;
        let indices: Vec<usize> = (0..batch.n_samples()).collect();
        self.update_indices(batch, &indices);
        Ok(())
    }

    pub(crate) fn validate(&self, batch: &Dataset) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::Empty("update batch"));
        }
        batch.check_compatible(self.tree.n_features, self.tree.n_classes)
    }

    /// Update with the rows at `indices`; the batch must already be validated.
    pub(crate) fn update_indices(&mut self, batch: &Dataset, indices: &[usize]) {
        let tree = &mut self.tree;
        let mut pending: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for &i in indices {
            let x = batch.row(i);
            let y = batch.label(i);
            let mut id = DecisionTree::ROOT;
            loop {
                let node = &mut tree.nodes[id];
                node.class_counts[y] += 1;
                match &node.rule {
                    Some(rule) => {
                        id = if x[rule.feature] <= rule.threshold {
                            rule.left
                        } else {
                            rule.right
                        }
                    }
                    None => break,
                }
            }
            pending.entry(id).or_default().push(i);
        }
        tree.grow(batch, pending.into_iter().collect(), &mut self.rng)
            .expect("criteria were validated at construction");
        self.batches_seen += 1;
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.tree.predict(x)
    }

    pub fn apply(&self, x: &[f64]) -> Result<NodeId> {
        self.tree.apply(x)
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        self.tree.predict_dataset(data)
    }

    pub fn tree(&self) -> &DecisionTree {
        &self.tree
    }

    pub fn into_tree(self) -> DecisionTree {
        self.tree
    }

    /// Batches absorbed so far, counting the initial fit.
    pub fn batches_seen(&self) -> u64 {
        self.batches_seen
    }

    pub fn n_classes(&self) -> usize {
        self.tree.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.tree.n_features
    }

    pub fn node_count(&self) -> usize {
        self.tree.node_count()
    }
}

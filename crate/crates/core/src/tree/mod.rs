//! Batch CART classification trees.
//!
//! Trees are stored as a flat arena of [`Node`]s addressed by [`NodeId`]. Node
//! ids are stable: growth only appends nodes and turns leaves into internal
//! nodes, which is what lets streaming updates extend a tree in place.

mod criteria;
mod impurity;
mod split;

pub use criteria::{MaxFeatures, SplitCriteria};
pub use impurity::gini_impurity;
pub use split::{best_split, Split};

use rand::seq::index::sample;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};
use split::SplitSearcher;

pub type NodeId = usize;

/// Routing rule of an internal node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRule {
    pub feature: usize,
    pub threshold: f64,
    pub left: NodeId,
    pub right: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub(crate) rule: Option<SplitRule>,
    pub(crate) class_counts: Vec<u64>,
    pub(crate) depth: usize,
}

impl Node {
    fn leaf(class_counts: Vec<u64>, depth: usize) -> Self {
        Node {
            rule: None,
            class_counts,
            depth,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.rule.is_none()
    }

    /// `None` for leaves.
    pub fn rule(&self) -> Option<&SplitRule> {
        self.rule.as_ref()
    }

    /// Counts of every training sample ever routed through or into this node.
    pub fn class_counts(&self) -> &[u64] {
        &self.class_counts
    }

    pub fn n_samples(&self) -> u64 {
        self.class_counts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Majority class, lowest index on ties.
    pub fn majority_class(&self) -> usize {
        argmax_lowest(&self.class_counts)
    }
}

/// Index of the largest count; the lowest index wins ties.
pub(crate) fn argmax_lowest(counts: &[u64]) -> usize {
    let mut best = 0;
    for (k, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = k;
        }
    }
    best
}

/// A binary classification tree of axis-aligned threshold splits.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub(crate) nodes: Vec<Node>,
    pub(crate) n_classes: usize,
    pub(crate) n_features: usize,
    pub(crate) criteria: SplitCriteria,
    pub(crate) seed: u64,
}

impl DecisionTree {
    pub const ROOT: NodeId = 0;

    /// Fits a tree on all of `data` by recursive Gini splitting.
    ///
    /// A fresh subset of features is drawn at every node according to
    /// `criteria.max_features`. The result depends only on the data order,
    /// the criteria, and `seed`.
    pub fn fit(data: &Dataset, criteria: &SplitCriteria, seed: u64) -> Result<Self> {
        let indices: Vec<usize> = (0..data.n_samples()).collect();
        let mut rng = seeded(seed);
        Self::fit_indices(data, indices, data.n_classes(), criteria, seed, &mut rng)
    }

    /// Fits on the rows at `indices` (duplicates count as repeated samples),
    /// drawing feature subsets from `rng`. Labels must be below `n_classes`.
    pub(crate) fn fit_indices(
        data: &Dataset,
        indices: Vec<usize>,
        n_classes: usize,
        criteria: &SplitCriteria,
        seed: u64,
        rng: &mut Rng,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("cannot fit a tree on an empty dataset"));
        }
        criteria.validate(data.n_features())?;
        let mut counts = vec![0u64; n_classes];
        for &i in &indices {
            counts[data.label(i)] += 1;
        }
        let mut tree = DecisionTree {
            nodes: vec![Node::leaf(counts, 0)],
            n_classes,
            n_features: data.n_features(),
            criteria: criteria.clone(),
            seed,
        };
        tree.grow(data, vec![(Self::ROOT, indices)], rng)?;
        Ok(tree)
    }

    /// Recursively splits each `(leaf, indices)` root using only those samples.
    ///
    /// The roots' own class counts must already include their samples; new
    /// children are counted from the samples routed to them. Roots are grown
    /// in the order given, each depth-first with the left child first.
    pub(crate) fn grow(&mut self, data: &Dataset, roots: Vec<(NodeId, Vec<usize>)>, rng: &mut Rng) -> Result<()> {
        let n_candidates = self.criteria.max_features.resolve(self.n_features)?;
        let mut searcher = SplitSearcher::default();
        let mut candidates: Vec<usize> = (0..self.n_features).collect();
        let mut local_counts = vec![0u64; self.n_classes];

        let mut stack: Vec<(NodeId, Vec<usize>)> = roots.into_iter().rev().collect();
        while let Some((id, indices)) = stack.pop() {
            debug_assert!(self.nodes[id].is_leaf());
            let depth = self.nodes[id].depth;
            if indices.len() < self.criteria.min_samples_split || self.criteria.max_depth.is_some_and(|d| depth >= d) {
                continue;
            }
            local_counts.iter_mut().for_each(|c| *c = 0);
            for &i in &indices {
                local_counts[data.label(i)] += 1;
            }
            if local_counts.iter().filter(|&&c| c > 0).count() < 2 {
                continue;
            }
            if n_candidates < self.n_features {
                candidates.clear();
                candidates.extend(sample(rng, self.n_features, n_candidates));
                candidates.sort_unstable();
            }
            let Some(split) = searcher.search(data, &indices, &candidates, &local_counts) else {
                continue;
            };
            if split.impurity_decrease < self.criteria.min_impurity_decrease {
                continue;
            }

            let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                .iter()
                .partition(|&&i| data.value(i, split.feature) <= split.threshold);
            let left = self.push_leaf(data, &left_idx, depth + 1);
            let right = self.push_leaf(data, &right_idx, depth + 1);
            self.nodes[id].rule = Some(SplitRule {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            });
            stack.push((right, right_idx));
            stack.push((left, left_idx));
        }
        Ok(())
    }

    fn push_leaf(&mut self, data: &Dataset, indices: &[usize], depth: usize) -> NodeId {
        let mut counts = vec![0u64; self.n_classes];
        for &i in indices {
            counts[data.label(i)] += 1;
        }
        self.nodes.push(Node::leaf(counts, depth));
        self.nodes.len() - 1
    }

    fn check_dims(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Leaf reached by `x` without dimension checks.
    #[inline]
    pub(crate) fn leaf_of(&self, x: &[f64]) -> NodeId {
        let mut id = Self::ROOT;
        while let Some(rule) = &self.nodes[id].rule {
            id = if x[rule.feature] <= rule.threshold {
                rule.left
            } else {
                rule.right
            };
        }
        id
    }

    /// The unique leaf whose region contains `x` (`<=` threshold goes left).
    pub fn apply(&self, x: &[f64]) -> Result<NodeId> {
        self.check_dims(x)?;
        Ok(self.leaf_of(x))
    }

    /// Majority class of the leaf reached by `x`, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.check_dims(x)?;
        Ok(self.predict_unchecked(x))
    }

    #[inline]
    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> usize {
        self.nodes[self.leaf_of(x)].majority_class()
    }

    /// Predictions for every row of `data`.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        if data.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        Ok(data.rows().map(|x| self.predict_unchecked(x)).collect())
    }

    /// Number of rows of `data` predicted correctly.
    pub(crate) fn correct_count(&self, data: &Dataset) -> usize {
        data.rows()
            .zip(data.labels())
            .filter(|(x, &y)| self.predict_unchecked(x) == y)
            .count()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> &Node {
        &self.nodes[Self::ROOT]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn criteria(&self) -> &SplitCriteria {
        &self.criteria
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `(feature, threshold)` of every internal node, in node-id order.
    pub fn internal_splits(&self) -> Vec<(usize, f64)> {
        self.nodes
            .iter()
            .filter_map(|n| n.rule.map(|r| (r.feature, r.threshold)))
            .collect()
    }

    /// Compares shape, splits, and counts, ignoring seeds and criteria.
    pub fn same_structure(&self, other: &DecisionTree) -> bool {
        self.nodes == other.nodes
    }
}

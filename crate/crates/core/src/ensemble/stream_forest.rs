use rand::Rng as _;
use rayon::prelude::*;

use super::{majority_vote, resample, ModelSize};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{next_seed, seeded, seeded_stream, Rng};
use crate::stream_tree::StreamTree;
use crate::tree::SplitCriteria;

/// Hyperparameters of a [`StreamForest`].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Trees swapped out when a replacement event fires.
    pub replace_count: usize,
    pub criteria: SplitCriteria,
    /// Resample every batch with replacement per tree. Turning this off makes
    /// every tree see the raw batch.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            replace_count: 1,
            criteria: SplitCriteria::forest(),
            bootstrap: true,
        }
    }
}

impl ForestParams {
    fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
        }
        if self.replace_count > self.n_trees {
            return Err(Error::InvalidArgument(format!(
                "replace_count {} exceeds n_trees {}",
                self.replace_count, self.n_trees
            )));
        }
        self.criteria.validate(n_features).map(|_| ())
    }
}

/// What happened in the most recent replacement event.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementEvent {
    /// Forest batch count when the event fired.
    pub batch: u64,
    /// Correct predictions of each tree on the raw current batch, scored after
    /// the trees were updated with it.
    pub correct: Vec<usize>,
    /// Indices of the replaced trees, worst first.
    pub replaced: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct Member {
    pub(crate) tree: StreamTree,
    /// Draws this tree's bootstrap indices.
    pub(crate) sampler: Rng,
}

impl Member {
    fn new(batch: &Dataset, n_classes: usize, params: &ForestParams, seed: u64) -> Result<Self> {
        let mut sampler = seeded_stream(seed, 1);
        let indices = resample(batch.n_samples(), params.bootstrap, &mut sampler);
        let tree = StreamTree::init_indices(batch, indices, n_classes, &params.criteria, seed)?;
        Ok(Member { tree, sampler })
    }
}

/// An ensemble of [`StreamTree`]s updated batch by batch.
///
/// Each update resamples the batch independently for every tree and extends
/// the trees with their resamples. Then, with probability `1/b` where `b`
/// counts batches including the first, the `replace_count` trees with the
/// fewest correct predictions on the current batch are discarded and replaced
/// by trees fit on a fresh resample of that batch alone. Lower tree indices
/// are replaced first on ties.
///
/// Every tree owns its generators, so per-tree work may run in parallel
/// without changing results.
#[derive(Debug, Clone)]
pub struct StreamForest {
    pub(crate) members: Vec<Member>,
    pub(crate) params: ForestParams,
    pub(crate) n_classes: usize,
    pub(crate) n_features: usize,
    pub(crate) master_seed: u64,
    pub(crate) batches_seen: u64,
    pub(crate) rng: Rng,
    pub(crate) replacement_override: Option<bool>,
    pub(crate) last_replacement: Option<ReplacementEvent>,
}

impl StreamForest {
    /// Builds `params.n_trees` trees, each on its own resample of `first_batch`.
    pub fn init(first_batch: &Dataset, n_classes: usize, params: ForestParams, seed: u64) -> Result<Self> {
        if first_batch.is_empty() {
            return Err(Error::Empty("first batch of a stream forest"));
        }
        if n_classes < 2 {
            return Err(Error::InvalidArgument("n_classes must be at least 2".into()));
        }
        params.validate(first_batch.n_features())?;
        first_batch.check_compatible(first_batch.n_features(), n_classes)?;

        let mut rng = seeded(seed);
        let seeds: Vec<u64> = (0..params.n_trees).map(|_| next_seed(&mut rng)).collect();
        let members = seeds
            .into_par_iter()
            .map(|s| Member::new(first_batch, n_classes, &params, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(StreamForest {
            members,
            n_features: first_batch.n_features(),
            n_classes,
            params,
            master_seed: seed,
            batches_seen: 1,
            rng,
            replacement_override: None,
            last_replacement: None,
        })
    }

    /// Absorbs one batch. On error the forest is unchanged.
    pub fn update(&mut self, batch: &Dataset) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::Empty("update batch"));
        }
        batch.check_compatible(self.n_features, self.n_classes)?;

        let n = batch.n_samples();
        let bootstrap = self.params.bootstrap;
        self.members.par_iter_mut().for_each(|m| {
            let indices = resample(n, bootstrap, &mut m.sampler);
            m.tree.update_indices(batch, &indices);
        });
        self.batches_seen += 1;

        let draw: f64 = self.rng.random();
        let fire = self
            .replacement_override
            .unwrap_or(draw < 1.0 / self.batches_seen as f64);
        if fire && self.params.replace_count > 0 {
            self.replace_worst(batch);
        } else {
            self.last_replacement = None;
        }
        Ok(())
    }

    fn replace_worst(&mut self, batch: &Dataset) {
        let correct: Vec<usize> = self
            .members
            .par_iter()
            .map(|m| m.tree.tree.correct_count(batch))
            .collect();
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by_key(|&i| (correct[i], i));
        order.truncate(self.params.replace_count);

        for &i in &order {
            let seed = next_seed(&mut self.rng);
            self.members[i] =
                Member::new(batch, self.n_classes, &self.params, seed).expect("batch was validated against the forest");
        }
        self.last_replacement = Some(ReplacementEvent {
            batch: self.batches_seen,
            correct,
            replaced: order,
        });
    }

    /// Per-class vote tally for `x`.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<u64>> {
        self.check_dims(x.len())?;
        let mut tally = vec![0u64; self.n_classes];
        for m in &self.members {
            tally[m.tree.tree.predict_unchecked(x)] += 1;
        }
        Ok(tally)
    }

    /// Plurality vote of the trees, lowest class on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.check_dims(x.len())?;
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[f64]) -> usize {
        majority_vote(
            self.members.iter().map(|m| m.tree.tree.predict_unchecked(x)),
            self.n_classes,
        )
    }

    /// Row-wise [`predict`](Self::predict); rows are evaluated in parallel.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        self.check_dims(data.n_features())?;
        let rows: Vec<&[f64]> = data.rows().collect();
        Ok(rows.par_iter().map(|x| self.predict_unchecked(x)).collect())
    }

    fn check_dims(&self, actual: usize) -> Result<()> {
        if actual != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual,
            });
        }
        Ok(())
    }

    pub fn model_size(&self) -> ModelSize {
        ModelSize::from_nodes(self.members.iter().map(|m| m.tree.node_count()).sum())
    }

    pub fn trees(&self) -> impl ExactSizeIterator<Item = &StreamTree> {
        self.members.iter().map(|m| &m.tree)
    }

    pub fn tree(&self, index: usize) -> &StreamTree {
        &self.members[index].tree
    }

    pub fn n_trees(&self) -> usize {
        self.members.len()
    }

    /// Batches seen, counting the initial one.
    pub fn batches_seen(&self) -> u64 {
        self.batches_seen
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// The replacement performed by the latest update, if any.
    pub fn last_replacement(&self) -> Option<&ReplacementEvent> {
        self.last_replacement.as_ref()
    }

    /// Test hook: `Some(true)` forces every later update to replace,
    /// `Some(false)` suppresses replacement, `None` restores the `1/b` draw.
    /// The draw is consumed either way, so the rest of the run stays aligned.
    #[doc(hidden)]
    pub fn set_replacement_override(&mut self, fire: Option<bool>) {
        self.replacement_override = fire;
    }

    /// Test hook: swaps in an arbitrary tree at `index`.
    #[doc(hidden)]
    pub fn set_tree(&mut self, index: usize, tree: StreamTree) -> Result<()> {
        if tree.n_features() != self.n_features || tree.n_classes() != self.n_classes {
            return Err(Error::InvalidArgument("tree shape does not match the forest".into()));
        }
        if index >= self.members.len() {
            return Err(Error::InvalidArgument(format!("no tree at index {index}")));
        }
        self.members[index].tree = tree;
        Ok(())
    }
}

use rayon::prelude::*;

use super::{majority_vote, resample, ModelSize};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{next_seed, seeded, seeded_stream};
use crate::tree::{DecisionTree, SplitCriteria};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BatchForestParams {
    pub n_trees: usize,
    pub criteria: SplitCriteria,
    pub bootstrap: bool,
}

impl Default for BatchForestParams {
    fn default() -> Self {
        BatchForestParams {
            n_trees: 100,
            criteria: SplitCriteria::forest(),
            bootstrap: true,
        }
    }
}

/// A conventional random forest, refit from scratch on all data seen so far.
///
/// Tree seeds and resamples are derived exactly as in
/// [`StreamForest::init`](super::StreamForest::init), so both forests agree
/// when fit on the same single batch with the same seed.
#[derive(Debug, Clone)]
pub struct BatchForest {
    trees: Vec<DecisionTree>,
    params: BatchForestParams,
    n_classes: usize,
    n_features: usize,
    seed: u64,
}

impl BatchForest {
    pub fn fit(data: &Dataset, params: BatchForestParams, seed: u64) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Empty("cannot fit a forest on an empty dataset"));
        }
        if params.n_trees == 0 {
            return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
        }
        params.criteria.validate(data.n_features())?;

        let mut rng = seeded(seed);
        let seeds: Vec<u64> = (0..params.n_trees).map(|_| next_seed(&mut rng)).collect();
        let trees = seeds
            .into_par_iter()
            .map(|s| {
                let mut sampler = seeded_stream(s, 1);
                let indices = resample(data.n_samples(), params.bootstrap, &mut sampler);
                DecisionTree::fit_indices(data, indices, data.n_classes(), &params.criteria, s, &mut seeded(s))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BatchForest {
            trees,
            n_classes: data.n_classes(),
            n_features: data.n_features(),
            params,
            seed,
        })
    }

    /// Discards every tree and fits again on `data`.
    pub fn refit(&mut self, data: &Dataset) -> Result<()> {
        *self = Self::fit(data, self.params.clone(), self.seed)?;
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    fn predict_unchecked(&self, x: &[f64]) -> usize {
        majority_vote(self.trees.iter().map(|t| t.predict_unchecked(x)), self.n_classes)
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        if data.n_features() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: data.n_features(),
            });
        }
        let rows: Vec<&[f64]> = data.rows().collect();
        Ok(rows.par_iter().map(|x| self.predict_unchecked(x)).collect())
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn params(&self) -> &BatchForestParams {
        &self.params
    }

    pub fn model_size(&self) -> ModelSize {
        ModelSize::from_nodes(self.trees.iter().map(DecisionTree::node_count).sum())
    }
}

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, ExperimentConfig};
use crate::data_io::{BatchPlan, FoldPlan};
use crate::dataset::{accuracy, Dataset};
use crate::ensemble::{BatchForest, StreamForest};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::stream_tree::StreamTree;
use crate::tree::DecisionTree;

/// One measurement: an algorithm's state after a given batch of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    pub dataset: String,
    /// Repetition index, or fold index under cross-validation.
    pub run: usize,
    /// 1-based batch number.
    pub batch: usize,
    /// Training samples seen so far.
    pub sample_size: usize,
    pub accuracy: f64,
    /// Training time summed over every update or refit so far.
    pub train_seconds: f64,
    pub node_count: usize,
}

fn plan_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, 2 * run as u64)
}

fn model_seed(seed: u64, run: usize) -> u64 {
    derive_seed(seed, 2 * run as u64 + 1)
}

fn fold_seed(seed: u64) -> u64 {
    derive_seed(seed, u64::MAX)
}

pub(crate) fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Default)]
struct Models {
    sdt: Option<StreamTree>,
    sdf: Option<StreamForest>,
    dt: Option<DecisionTree>,
    df: Option<BatchForest>,
}

/// Streams `train` through every configured algorithm once.
///
/// Streaming models are initialized on the first batch and updated with each
/// later one; batch models are refit from scratch on every sample streamed so
/// far. Only the fit/update call is timed.
///
/// Run `r` shuffles with `derive_seed(config.seed, 2 * r)` and seeds every
/// model with `derive_seed(config.seed, 2 * r + 1)`.
pub fn run_single(config: &ExperimentConfig, train: &Dataset, test: &Dataset, run: usize) -> Result<Vec<BenchRecord>> {
    test.check_compatible(train.n_features(), train.n_classes())?;
    let plan = BatchPlan::new(train.n_samples(), config.batch_size, plan_seed(config.seed, run))?;
    let seed = model_seed(config.seed, run);
    let n_classes = train.n_classes();
    let n_batches = config.max_batches.map_or(plan.n_batches(), |m| m.min(plan.n_batches()));
    let needs_cumulative = config.algorithms.iter().any(|a| !a.is_streaming());

    let mut models = Models::default();
    let mut seconds: BTreeMap<Algorithm, f64> = BTreeMap::new();
    let mut records = Vec::with_capacity(n_batches * config.algorithms.len());

    for j in 0..n_batches {
        let batch = train.select(plan.batch(j));
        let cumulative = needs_cumulative.then(|| train.select(plan.cumulative(j)));
        let sample_size = plan.cumulative(j).len();

        for &alg in &config.algorithms {
            let start = Instant::now();
            match alg {
                Algorithm::Sdt => match &mut models.sdt {
                    Some(t) => t.update(&batch)?,
                    None => models.sdt = Some(StreamTree::init(&batch, n_classes, &config.tree_criteria(), seed)?),
                },
                Algorithm::Sdf => match &mut models.sdf {
                    Some(f) => f.update(&batch)?,
                    None => {
                        models.sdf = Some(StreamForest::init(
                            &batch,
                            n_classes,
                            config.stream_forest_params(),
                            seed,
                        )?)
                    }
                },
                Algorithm::Dt => {
                    let data = cumulative.as_ref().expect("built for batch models");
                    models.dt = Some(DecisionTree::fit(data, &config.tree_criteria(), seed)?);
                }
                Algorithm::Df => {
                    let data = cumulative.as_ref().expect("built for batch models");
                    models.df = Some(BatchForest::fit(data, config.batch_forest_params(), seed)?);
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            let total = seconds.entry(alg).or_insert(0.0);
            *total += elapsed;

            let (predictions, node_count) = match alg {
                Algorithm::Sdt => {
                    let m = models.sdt.as_ref().expect("fitted above");
                    (m.predict_dataset(test)?, m.node_count())
                }
                Algorithm::Sdf => {
                    let m = models.sdf.as_ref().expect("fitted above");
                    (m.predict_dataset(test)?, m.model_size().node_count)
                }
                Algorithm::Dt => {
                    let m = models.dt.as_ref().expect("fitted above");
                    (m.predict_dataset(test)?, m.node_count())
                }
                Algorithm::Df => {
                    let m = models.df.as_ref().expect("fitted above");
                    (m.predict_dataset(test)?, m.model_size().node_count)
                }
            };
            records.push(BenchRecord {
                algorithm: alg,
                dataset: config.dataset.clone(),
                run,
                batch: j + 1,
                sample_size,
                accuracy: accuracy(&predictions, test.labels()),
                train_seconds: *total,
                node_count,
            });
        }
    }
    Ok(records)
}

fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by_key(|r| (r.run, r.algorithm, r.batch));
}

/// Fixed train/test protocol repeated `config.repetitions` times, each with
/// its own shuffled batch order. The test set never changes.
pub fn run_stream_experiment(config: &ExperimentConfig, train: &Dataset, test: &Dataset) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::Empty("train and test sets must be nonempty"));
    }
    let runs = in_pool(config.threads, || {
        (0..config.repetitions)
            .into_par_iter()
            .map(|r| run_single(config, train, test, r))
            .collect::<Result<Vec<_>>>()
    })??;
    let mut records: Vec<BenchRecord> = runs.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// k-fold cross-validation: each fold is held out once while the remaining
/// samples are streamed. Records are tagged with the fold index. Folds are
/// drawn with `derive_seed(config.seed, u64::MAX)`.
pub fn run_cv_experiment(config: &ExperimentConfig, data: &Dataset) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let folds = FoldPlan::new(data.n_samples(), config.folds, fold_seed(config.seed))?;
    let runs = in_pool(config.threads, || {
        (0..config.folds)
            .into_par_iter()
            .map(|f| {
                let train = data.select(&folds.train_indices(f));
                let test = data.select(&folds.test_indices(f));
                run_single(config, &train, &test, f)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut records: Vec<BenchRecord> = runs.into_iter().flatten().collect();
    sort_records(&mut records);
    Ok(records)
}

/// Splits off a seeded random `test_fraction` of `data` as a test set.
pub fn holdout_split(data: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument("test_fraction must be in (0, 1)".into()));
    }
    let n = data.n_samples();
    let n_test = ((n as f64) * test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::InvalidArgument(format!(
            "cannot hold out {n_test} of {n} samples"
        )));
    }
    let plan = BatchPlan::new(n, n, derive_seed(seed, 0x7e57))?;
    let (test, train) = plan.ordering().split_at(n_test);
    let (mut train, mut test) = (train.to_vec(), test.to_vec());
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select(&train), data.select(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_io::{gen_synthetic, SyntheticSpec};

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            dataset: "blobs".into(),
            batch_size: 40,
            n_trees: 5,
            repetitions: 1,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn one_record_per_algorithm_and_batch() {
        let train = gen_synthetic(&SyntheticSpec::blobs(120, 2, 3, 0.1, 1)).unwrap();
        let test = gen_synthetic(&SyntheticSpec::blobs(30, 2, 3, 0.1, 2)).unwrap();
        let records = run_stream_experiment(&small_config(), &train, &test).unwrap();
        assert_eq!(records.len(), 12);
        for alg in Algorithm::ALL {
            let mine: Vec<&BenchRecord> = records.iter().filter(|r| r.algorithm == alg).collect();
            assert_eq!(
                mine.iter().map(|r| r.sample_size).collect::<Vec<_>>(),
                vec![40, 80, 120]
            );
            assert!(mine.windows(2).all(|w| w[1].train_seconds >= w[0].train_seconds));
        }
    }

    #[test]
    fn max_batches_truncates_runs() {
        let train = gen_synthetic(&SyntheticSpec::blobs(120, 2, 3, 0.1, 1)).unwrap();
        let config = ExperimentConfig {
            max_batches: Some(2),
            algorithms: vec![Algorithm::Sdt],
            ..small_config()
        };
        let records = run_stream_experiment(&config, &train, &train).unwrap();
        assert_eq!(records.len(), 2);
    }

    #[test]
    fn mismatched_test_set_is_rejected() {
        let train = gen_synthetic(&SyntheticSpec::blobs(40, 2, 3, 0.1, 1)).unwrap();
        let test = gen_synthetic(&SyntheticSpec::blobs(40, 3, 3, 0.1, 1)).unwrap();
        assert!(run_stream_experiment(&small_config(), &train, &test).is_err());
    }

    #[test]
    fn holdout_partitions_the_data() {
        let d = gen_synthetic(&SyntheticSpec::blobs(100, 2, 2, 0.1, 1)).unwrap();
        let (train, test) = holdout_split(&d, 0.25, 9).unwrap();
        assert_eq!((train.n_samples(), test.n_samples()), (75, 25));
        assert!(holdout_split(&d, 1.0, 9).is_err());
    }
}

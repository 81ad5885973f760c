//! Benchmark protocol: stream batches into the streaming models, refit the
//! batch baselines on everything seen so far, and record accuracy, cumulative
//! training time, and model size after every batch.

mod config;
mod effect;
mod results;
mod run;

pub use config::{parse_algorithms, Algorithm, ExperimentConfig};
pub use effect::{effect_series, effect_size, substantial_shift, EffectPoint, EffectSeries, SHIFT_THRESHOLD};
pub use results::{emit_results, load_results, rows_without_timing, ResultsFile, RESULTS_FORMAT};
pub use run::{holdout_split, run_cv_experiment, run_single, run_stream_experiment, BenchRecord};

//! Relative accuracy difference between the stream forest and the batch forest.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::Algorithm;
use super::run::BenchRecord;
use crate::error::{Error, Result};

/// Effect sizes at or beyond this magnitude in both directions mark a
/// substantial shift.
pub const SHIFT_THRESHOLD: f64 = 0.01;

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `(mean(stream) - mean(batch)) / mean(batch)`; positive favours the stream forest.
pub fn effect_size(stream_acc: &[f64], batch_acc: &[f64]) -> Result<f64> {
    if stream_acc.is_empty() || stream_acc.len() != batch_acc.len() {
        return Err(Error::InvalidArgument(format!(
            "need equally many nonempty accuracies, got {} and {}",
            stream_acc.len(),
            batch_acc.len()
        )));
    }
    let base = mean(batch_acc);
    if base <= 0.0 {
        return Err(Error::Domain("mean batch accuracy is zero".into()));
    }
    // same value as (s - b) / b, but exact when the ratio is representable
    Ok(mean(stream_acc) / base - 1.0)
}

/// True when the series dips to `-1%` or below and also reaches `+1%` or above.
pub fn substantial_shift(series: &[f64]) -> bool {
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    min <= -SHIFT_THRESHOLD && max >= SHIFT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectPoint {
    pub batch: usize,
    /// Smallest training size across runs at this batch.
    pub sample_size: usize,
    pub stream_mean: f64,
    pub batch_mean: f64,
    pub effect_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectSeries {
    pub dataset: String,
    pub points: Vec<EffectPoint>,
    pub substantial_shift: bool,
}

/// Averages stream-forest and batch-forest accuracy over runs at every batch
/// and turns each pair of means into an effect size, one series per dataset.
/// Batches missing either algorithm are skipped.
pub fn effect_series(records: &[BenchRecord]) -> Result<Vec<EffectSeries>> {
    type Cell = (Vec<f64>, Vec<f64>, usize);
    let mut grouped: BTreeMap<&str, BTreeMap<usize, Cell>> = BTreeMap::new();
    for r in records {
        let cell = grouped
            .entry(&r.dataset)
            .or_default()
            .entry(r.batch)
            .or_insert_with(|| (Vec::new(), Vec::new(), usize::MAX));
        match r.algorithm {
            Algorithm::Sdf => cell.0.push(r.accuracy),
            Algorithm::Df => cell.1.push(r.accuracy),
            _ => continue,
        }
        cell.2 = cell.2.min(r.sample_size);
    }

    let mut out = Vec::new();
    for (dataset, batches) in grouped {
        let mut points = Vec::new();
        for (batch, (sdf, df, sample_size)) in batches {
            if sdf.is_empty() || df.is_empty() {
                continue;
            }
            points.push(EffectPoint {
                batch,
                sample_size,
                stream_mean: mean(&sdf),
                batch_mean: mean(&df),
                effect_size: effect_size(&sdf, &df)?,
            });
        }
        if points.is_empty() {
            continue;
        }
        let series: Vec<f64> = points.iter().map(|p| p.effect_size).collect();
        out.push(EffectSeries {
            dataset: dataset.to_string(),
            substantial_shift: substantial_shift(&series),
            points,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_means_give_zero() {
        assert_eq!(effect_size(&[0.9], &[0.9]).unwrap(), 0.0);
        assert_eq!(effect_size(&[0.7, 0.3], &[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn hand_checked_ratio() {
        assert_eq!(effect_size(&[0.9], &[0.8]).unwrap(), 0.125);
        assert!(effect_size(&[0.8], &[0.9]).unwrap() < 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(effect_size(&[0.5], &[0.0]), Err(Error::Domain(_))));
        assert!(effect_size(&[], &[]).is_err());
        assert!(effect_size(&[0.5, 0.5], &[0.5]).is_err());
    }

    #[test]
    fn shift_needs_both_directions() {
        assert!(substantial_shift(&[0.02, 0.0, -0.015]));
        assert!(substantial_shift(&[-0.01, 0.01]));
        assert!(!substantial_shift(&[0.05, 0.03]));
        assert!(!substantial_shift(&[-0.009, 0.5]));
        assert!(!substantial_shift(&[]));
    }
}

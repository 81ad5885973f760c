//! Dense labeled feature matrices.

use crate::error::{Error, Result};

/// A dense row-major feature matrix with integer class labels in `0..n_classes`.
///
/// The class count is declared up front rather than inferred from the labels,
/// so a dataset may legitimately contain only a subset of its classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    n_features: usize,
    n_classes: usize,
}

impl Dataset {
    /// Builds a dataset from row-major `features`.
    pub fn new(features: Vec<f64>, labels: Vec<usize>, n_features: usize, n_classes: usize) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidArgument("n_features must be at least 1".into()));
        }
        if n_classes < 2 {
            return Err(Error::InvalidArgument("n_classes must be at least 2".into()));
        }
        if features.len() != labels.len() * n_features {
            return Err(Error::InvalidArgument(format!(
                "{} feature values do not form {} rows of {} features",
                features.len(),
                labels.len(),
                n_features
            )));
        }
        if let Some((row, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(Error::LabelOutOfRange { row, label, n_classes });
        }
        Ok(Self {
            features,
            labels,
            n_features,
            n_classes,
        })
    }

    /// Builds a dataset from a slice of rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let n_features = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_features {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} features, expected {n_features}",
                    row.len()
                )));
            }
            features.extend_from_slice(row);
        }
        Self::new(features, labels, n_features, n_classes)
    }

    pub fn n_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.features[i * self.n_features + feature]
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Row-major feature storage.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.n_features)
    }

    /// A new dataset holding the given rows in the given order (duplicates allowed).
    pub fn select(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features,
            labels,
            n_features: self.n_features,
            n_classes: self.n_classes,
        }
    }

    /// Per-class label counts over the whole dataset.
    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Checks that this dataset can be fed to a model with `n_features` inputs and `n_classes` outputs.
    pub(crate) fn check_compatible(&self, n_features: usize, n_classes: usize) -> Result<()> {
        if self.n_features != n_features {
            return Err(Error::DimensionMismatch {
                expected: n_features,
                actual: self.n_features,
            });
        }
        if let Some((row, &label)) = self.labels.iter().enumerate().find(|(_, &l)| l >= n_classes) {
            return Err(Error::LabelOutOfRange { row, label, n_classes });
        }
        Ok(())
    }
}

/// Fraction of `predictions` equal to `labels`; zero for empty input.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let correct = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    correct as f64 / labels.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_label_out_of_range() {
        let err = Dataset::new(vec![0.0, 1.0], vec![0, 2], 1, 2).unwrap_err();
        assert_eq!(
            err,
            Error::LabelOutOfRange {
                row: 1,
                label: 2,
                n_classes: 2
            }
        );
    }

    #[test]
    fn rejects_shape_mismatch() {
        assert!(Dataset::new(vec![0.0; 5], vec![0, 1], 2, 2).is_err());
        assert!(Dataset::new(vec![], vec![], 0, 2).is_err());
        assert!(Dataset::new(vec![1.0], vec![0], 1, 1).is_err());
    }

    #[test]
    fn select_keeps_duplicates() {
        let d = Dataset::from_rows(&[[1.0, 2.0], [3.0, 4.0]], vec![0, 1], 3).unwrap();
        let s = d.select(&[1, 1, 0]);
        assert_eq!(s.n_samples(), 3);
        assert_eq!(s.row(0), &[3.0, 4.0]);
        assert_eq!(s.labels(), &[1, 1, 0]);
        assert_eq!(s.class_counts(), vec![1, 2, 0]);
    }

    #[test]
    fn accuracy_counts_matches() {
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]), 0.75);
        assert_eq!(accuracy(&[], &[]), 0.0);
    }
}

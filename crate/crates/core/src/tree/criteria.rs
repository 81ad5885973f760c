use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How many candidate features are drawn at each node split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    /// `max(1, floor(sqrt(p)))`
    Sqrt,
    Fixed(usize),
}

impl MaxFeatures {
    /// Number of features to draw out of `n_features`.
    pub fn resolve(self, n_features: usize) -> Result<usize> {
        let m = match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Fixed(m) => m,
        };
        if m == 0 || m > n_features {
            return Err(Error::InvalidArgument(format!(
                "max_features resolves to {m}, must be in 1..={n_features}"
            )));
        }
        Ok(m)
    }
}

/// Stopping and feature-sampling rules shared by batch and streaming growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCriteria {
    /// Nodes with fewer samples than this become leaves.
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    /// A split is kept only if the node-local Gini decrease reaches this value.
    pub min_impurity_decrease: f64,
    /// Unlimited when `None`.
    pub max_depth: Option<usize>,
}

impl Default for SplitCriteria {
    fn default() -> Self {
        Self {
            min_samples_split: 2,
            max_features: MaxFeatures::All,
            min_impurity_decrease: 0.0,
            max_depth: None,
        }
    }
}

impl SplitCriteria {
    /// Defaults with the square-root feature rule used by forests.
    pub fn forest() -> Self {
        Self {
            max_features: MaxFeatures::Sqrt,
            ..Self::default()
        }
    }

    pub fn with_max_features(mut self, max_features: MaxFeatures) -> Self {
        self.max_features = max_features;
        self
    }

    pub fn with_max_depth(mut self, max_depth: Option<usize>) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_min_samples_split(mut self, min_samples_split: usize) -> Self {
        self.min_samples_split = min_samples_split;
        self
    }

    pub fn validate(&self, n_features: usize) -> Result<usize> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidArgument(format!(
                "min_samples_split must be at least 2, got {}",
                self.min_samples_split
            )));
        }
        if self.min_impurity_decrease.is_nan() || self.min_impurity_decrease < 0.0 {
            return Err(Error::InvalidArgument(
                "min_impurity_decrease must be nonnegative".into(),
            ));
        }
        self.max_features.resolve(n_features)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_rule_floors_with_minimum_one() {
        assert_eq!(MaxFeatures::Sqrt.resolve(1).unwrap(), 1);
        assert_eq!(MaxFeatures::Sqrt.resolve(3).unwrap(), 1);
        assert_eq!(MaxFeatures::Sqrt.resolve(16).unwrap(), 4);
        assert_eq!(MaxFeatures::Sqrt.resolve(60).unwrap(), 7);
        assert_eq!(MaxFeatures::Sqrt.resolve(3072).unwrap(), 55);
    }

    #[test]
    fn fixed_out_of_range_is_rejected() {
        assert!(MaxFeatures::Fixed(0).resolve(4).is_err());
        assert!(MaxFeatures::Fixed(5).resolve(4).is_err());
        assert_eq!(MaxFeatures::Fixed(4).resolve(4).unwrap(), 4);
    }

    #[test]
    fn min_samples_split_below_two_is_rejected() {
        let c = SplitCriteria::default().with_min_samples_split(1);
        assert!(c.validate(3).is_err());
        assert!(SplitCriteria {
            min_impurity_decrease: f64::NAN,
            ..Default::default()
        }
        .validate(3)
        .is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::ensemble::{BatchForestParams, ForestParams};
use crate::error::{Error, Result};
use crate::tree::SplitCriteria;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Stream tree.
    Sdt,
    /// Stream forest.
    Sdf,
    /// Batch tree refit on all data seen so far.
    Dt,
    /// Batch forest refit on all data seen so far.
    Df,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Sdt, Algorithm::Sdf, Algorithm::Dt, Algorithm::Df];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Sdt => "sdt",
            Algorithm::Sdf => "sdf",
            Algorithm::Dt => "dt",
            Algorithm::Df => "df",
        }
    }

    pub fn is_streaming(self) -> bool {
        matches!(self, Algorithm::Sdt | Algorithm::Sdf)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sdt" => Ok(Algorithm::Sdt),
            "sdf" => Ok(Algorithm::Sdf),
            "dt" => Ok(Algorithm::Dt),
            "df" => Ok(Algorithm::Df),
            other => Err(Error::InvalidArgument(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Parses a comma-separated algorithm list such as `sdf,df`.
pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let mut algs = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Algorithm>>>()?;
    algs.sort_unstable();
    algs.dedup();
    Ok(algs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Name written into every record.
    pub dataset: String,
    pub algorithms: Vec<Algorithm>,
    pub batch_size: usize,
    pub n_trees: usize,
    pub replace_count: usize,
    /// Randomized repetitions of the train/test protocol.
    pub repetitions: usize,
    /// Folds of the cross-validation protocol.
    pub folds: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub threads: usize,
    /// Stop each run after this many batches.
    pub max_batches: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: "data".into(),
            algorithms: Algorithm::ALL.to_vec(),
            batch_size: 100,
            n_trees: 100,
            replace_count: 1,
            repetitions: 5,
            folds: 5,
            seed: 0,
            threads: 0,
            max_batches: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithms selected".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
        }
        if self.n_trees == 0 || self.replace_count > self.n_trees {
            return Err(Error::InvalidArgument(
                "need n_trees >= 1 and replace_count <= n_trees".into(),
            ));
        }
        if self.max_batches == Some(0) {
            return Err(Error::InvalidArgument("max_batches must be at least 1".into()));
        }
        Ok(())
    }

    /// Criteria for the single-tree models: every feature is a candidate.
    pub fn tree_criteria(&self) -> SplitCriteria {
        SplitCriteria::default()
    }

    pub fn stream_forest_params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            replace_count: self.replace_count,
            ..ForestParams::default()
        }
    }

    pub fn batch_forest_params(&self) -> BatchForestParams {
        BatchForestParams {
            n_trees: self.n_trees,
            ..BatchForestParams::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_algorithm_lists() {
        assert_eq!(
            parse_algorithms("df, SDF,sdf").unwrap(),
            vec![Algorithm::Sdf, Algorithm::Df]
        );
        assert!(parse_algorithms("sdf,ht").is_err());
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig {
            algorithms: vec![],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            n_trees: 2,
            replace_count: 3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}

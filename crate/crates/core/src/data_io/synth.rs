//! Small synthetic classification problems.

use std::f64::consts::TAU;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::{seeded, seeded_stream, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    /// Isotropic Gaussian clusters. Class `c` is centred at `c` on the first
    /// axis (unit spacing) and at a seeded uniform point of `[0, 1)` on the
    /// others. The cluster standard deviation is `0.1 + noise`.
    Blobs,
    /// Two-class checkerboard on two features: the label is whether the
    /// coordinates have opposite signs.
    Xor,
    /// Two-class rings of radius 1 and 2 on two features.
    Concentric,
}

impl std::str::FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "blobs" => Ok(SyntheticKind::Blobs),
            "xor" => Ok(SyntheticKind::Xor),
            "concentric" => Ok(SyntheticKind::Concentric),
            _ => Err(Error::InvalidArgument(format!("unknown synthetic kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SyntheticKind::Blobs => "blobs",
            SyntheticKind::Xor => "xor",
            SyntheticKind::Concentric => "concentric",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n_samples: usize,
    /// Blobs only; the other kinds always have two features.
    pub n_features: usize,
    /// Blobs only; the other kinds always have two classes.
    pub n_classes: usize,
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n_samples: usize, seed: u64) -> Self {
        SyntheticSpec {
            kind,
            n_samples,
            n_features: 2,
            n_classes: 2,
            noise: 0.0,
            seed,
        }
    }

    pub fn blobs(n_samples: usize, n_features: usize, n_classes: usize, noise: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind: SyntheticKind::Blobs,
            n_samples,
            n_features,
            n_classes,
            noise,
            seed,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }
}

/// Generates the dataset described by `spec`. Labels cycle through the
/// classes, so class counts differ by at most one.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n_samples < 4 {
        return Err(Error::InvalidArgument(
            "synthetic datasets need at least 4 samples".into(),
        ));
    }
    if spec.noise.is_nan() || spec.noise < 0.0 || !spec.noise.is_finite() {
        return Err(Error::InvalidArgument("noise must be finite and nonnegative".into()));
    }
    let mut rng = seeded(spec.seed);
    match spec.kind {
        SyntheticKind::Blobs => blobs(spec, &mut rng),
        SyntheticKind::Xor => {
            let mut features = Vec::with_capacity(spec.n_samples * 2);
            let mut labels = Vec::with_capacity(spec.n_samples);
            for i in 0..spec.n_samples {
                let y = i % 2;
                // alternate between the two quadrants of each class
                let flip = (i / 2) % 2 == 1;
                let (sx, sy) = match (y, flip) {
                    (0, false) => (1.0, 1.0),
                    (0, true) => (-1.0, -1.0),
                    (_, false) => (1.0, -1.0),
                    (_, true) => (-1.0, 1.0),
                };
                let x0 = sx * rng.random::<f64>() + spec.noise * normal(&mut rng);
                let x1 = sy * rng.random::<f64>() + spec.noise * normal(&mut rng);
                features.extend([x0, x1]);
                labels.push(y);
            }
            Dataset::new(features, labels, 2, 2)
        }
        SyntheticKind::Concentric => {
            let mut features = Vec::with_capacity(spec.n_samples * 2);
            let mut labels = Vec::with_capacity(spec.n_samples);
            for i in 0..spec.n_samples {
                let y = i % 2;
                let radius = 1.0 + y as f64 + spec.noise * normal(&mut rng);
                let angle = TAU * rng.random::<f64>();
                features.extend([radius * angle.cos(), radius * angle.sin()]);
                labels.push(y);
            }
            Dataset::new(features, labels, 2, 2)
        }
    }
}

fn blobs(spec: &SyntheticSpec, rng: &mut Rng) -> Result<Dataset> {
    let (p, k) = (spec.n_features, spec.n_classes);
    if p == 0 || k < 2 {
        return Err(Error::InvalidArgument(
            "blobs need n_features >= 1 and n_classes >= 2".into(),
        ));
    }
    // centres come from their own stream so they do not depend on n_samples
    let mut centre_rng = seeded_stream(spec.seed, 1);
    let centres: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            std::iter::once(c as f64)
                .chain((1..p).map(|_| centre_rng.random::<f64>()))
                .collect()
        })
        .collect();
    let sigma = 0.1 + spec.noise;
    let mut features = Vec::with_capacity(spec.n_samples * p);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for i in 0..spec.n_samples {
        let y = i % k;
        features.extend(centres[y].iter().map(|&m| m + sigma * normal(rng)));
        labels.push(y);
    }
    Dataset::new(features, labels, p, k)
}

fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

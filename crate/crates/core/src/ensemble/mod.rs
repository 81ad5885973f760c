//! Forests of stream trees and of batch trees.

mod batch_forest;
mod stream_forest;
mod vote;

pub use batch_forest::{BatchForest, BatchForestParams};
pub(crate) use stream_forest::Member;
pub use stream_forest::{ForestParams, ReplacementEvent, StreamForest};
pub use vote::majority_vote;

use rand::Rng as _;

use crate::rng::Rng;

/// Fixed per-node cost behind [`ModelSize::estimated_bytes`]. It is written
/// into benchmark result headers so byte estimates can be reinterpreted.
pub const NODE_BYTES: usize = 64;

/// Deterministic stand-in for memory footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelSize {
    pub node_count: usize,
    pub estimated_bytes: usize,
}

impl ModelSize {
    pub fn from_nodes(node_count: usize) -> Self {
        ModelSize {
            node_count,
            estimated_bytes: node_count * NODE_BYTES,
        }
    }
}

/// `n` row indices drawn uniformly with replacement from `0..n`, or the
/// identity when `bootstrap` is off.
pub(crate) fn resample(n: usize, bootstrap: bool, rng: &mut Rng) -> Vec<usize> {
    if bootstrap {
        (0..n).map(|_| rng.random_range(0..n)).collect()
    } else {
        (0..n).collect()
    }
}

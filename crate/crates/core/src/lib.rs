//! Decision trees and forests that learn from a stream of fixed-size batches.
//!
//! A [`StreamTree`] starts as an ordinary CART tree fit on the first batch.
//! Each later batch is routed to the existing leaves, and every leaf that
//! receives samples is split further using those samples alone. Internal
//! nodes are never changed, so no past data has to be kept.
//!
//! A [`StreamForest`] bags stream trees: each tree is updated with its own
//! bootstrap resample of every batch, splits consider a random `sqrt(p)`
//! subset of features, and with probability `1/b` after batch `b` the worst
//! trees on the current batch are replaced with trees grown on that batch.
//!
//! ```
//! use stream_forest::{Dataset, ForestParams, StreamForest};
//!
//! let first = Dataset::from_rows(&[[0.0, 0.1], [1.0, 0.9], [0.2, 0.0], [0.9, 1.0]], vec![0, 1, 0, 1], 2)?;
//! let params = ForestParams { n_trees: 10, ..Default::default() };
//! let mut forest = StreamForest::init(&first, 2, params, 42)?;
//!
//! let next = Dataset::from_rows(&[[0.1, 0.2], [0.8, 0.7]], vec![0, 1], 2)?;
//! forest.update(&next)?;
//! assert_eq!(forest.batches_seen(), 2);
//! assert_eq!(forest.predict(&[0.95, 0.95])?, 1);
//! # Ok::<(), stream_forest::Error>(())
//! ```
//!
//! The [`bench`] module runs the comparison protocol against batch trees and
//! forests refit on all data seen so far, and [`data_io`] loads CSV data and
//! builds seeded batch and fold plans.

pub mod bench;
pub mod data_io;
mod dataset;
pub mod ensemble;
mod error;
pub mod rng;
pub mod snapshot;
mod stream_tree;
pub mod tree;

pub use dataset::{accuracy, Dataset};
pub use ensemble::{BatchForest, BatchForestParams, ForestParams, ModelSize, StreamForest};
pub use error::{Error, Result};
pub use stream_tree::StreamTree;
pub use tree::{DecisionTree, MaxFeatures, SplitCriteria};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/stream-trees.md")]
    mod stream_trees {}
    #[doc = include_str!("../../../book/src/stream-forests.md")]
    mod stream_forests {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

//! Loading, partitioning, and generating datasets.

mod csv;
mod plan;
mod synth;

pub use self::csv::{load_csv, read_csv, save_csv, write_csv, CsvOptions, LabelColumn, LabelMap, LoadedCsv};
pub use plan::{BatchPlan, FoldPlan};
pub use synth::{gen_synthetic, SyntheticKind, SyntheticSpec};

//! Prec@k and MRR@k, overall and per slice.
//!
//! Hits are tallied per rank as integers, so every metric is an exact
//! rational; floats only appear in the serialized reports.

mod compare;
mod metrics;
mod report;

pub use compare::{compare_reports, Comparison, ComparisonCell};
pub use metrics::{mrr_at_k, precision_at_k, tally_ranks, ExactRatio, RankTally};
pub use report::{evaluate_slices, EvalOptions, MetricsReport, SliceMetrics, OVERALL};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_MIN_SLICE_SAMPLES: u64 = 30;

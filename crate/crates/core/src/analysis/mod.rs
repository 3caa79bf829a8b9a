//! Sample-level relation analyses: label relation records, pure and
//! direct/indirect partitions, and relation proportions inside predictions.

mod partition;
mod predictions;
mod proportions;
mod records;

pub use partition::{direct_indirect_partition, pure_partition, Slice, SlicePartition};
pub use predictions::{
    read_prediction_file, write_prediction_file, PredictionFileReport, PredictionSet,
};
pub use proportions::{prediction_cr_proportions, CountingMode, CrProportions};
pub use records::{
    label_cr_records, write_records_tsv, LabelCrAnalysis, LabelCrDistribution, LabelCrRecord,
    SELF_PAIR_CLASS,
};

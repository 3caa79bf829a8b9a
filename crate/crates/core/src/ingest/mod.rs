//! Event-log ingestion, filtering, chronological splitting and dataset statistics.

mod cache;
mod events;
mod presets;
mod sequences;
mod split;
mod stats;

pub use cache::{read_sample_set, read_sequence_set, write_sample_set, write_sequence_set};
pub use events::{parse_events, Column, ColumnMapping, Event, ParsedEvents, RowError};
pub use presets::{DatasetPreset, PRESETS};
pub use sequences::{build_sequences, preprocess, Grouping, Sequence, SequenceSet, Vocab};
pub use split::{split_chronological, DatasetSplit, Sample, SampleSet, SplitRatios};
pub use stats::{dataset_stats, StatsReport};

pub const SECONDS_PER_DAY: i64 = 86_400;

use num_rational::Ratio;
use serde::Serialize;

use super::SequenceSet;

/// Corpus volume statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsReport {
    pub n_items: u64,
    pub n_interactions: u64,
    pub n_sequences: u64,
    pub avg_length: Ratio<u64>,
}

#[derive(Serialize)]
struct StatsJson<'a> {
    schema_version: u32,
    items: u64,
    interactions: u64,
    sequences: u64,
    avg_length: f64,
    avg_length_exact: &'a str,
}

impl StatsReport {
    /// Average length rounded half-up to two decimals.
    pub fn avg_length_2dp(&self) -> String {
        let hundredths = (self.avg_length.numer() * 200 + self.avg_length.denom())
            / (self.avg_length.denom() * 2);
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let exact = format!("{}/{}", self.n_interactions, self.n_sequences);
        serde_json::to_value(StatsJson {
            schema_version: 1,
            items: self.n_items,
            interactions: self.n_interactions,
            sequences: self.n_sequences,
            avg_length: self.avg_length_2dp().parse().expect("formatted decimal"),
            avg_length_exact: &exact,
        })
        .expect("stats serialize")
    }
}

/// Counts items that occur, interactions and sequences.
///
/// # Panics
///
/// Panics on an empty set.
pub fn dataset_stats(data: &SequenceSet) -> StatsReport {
    assert!(!data.is_empty(), "dataset_stats needs at least one sequence");
    let n_interactions = data.n_interactions();
    let n_sequences = data.len() as u64;
    StatsReport {
        n_items: data.counts.iter().filter(|&&c| c > 0).count() as u64,
        n_interactions,
        n_sequences,
        avg_length: Ratio::new(n_interactions, n_sequences),
    }
}

use rayon::prelude::*;
use serde_json::json;

use super::PredictionSet;
use crate::crgraph::{ClassCounts, CrClass, CrResolver, GlobalGraph};
use crate::ingest::SampleSet;
use crate::{Error, Result};

/// How relations between predicted and prefix items are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingMode {
    /// Every (predicted item, prefix item) pair is one observation.
    #[default]
    PerPair,
    /// Every predicted item is one observation: its closest relation to
    /// any prefix item.
    NearestPerItem,
}

impl CountingMode {
    pub fn name(self) -> &'static str {
        match self {
            CountingMode::PerPair => "per-pair",
            CountingMode::NearestPerItem => "nearest-per-item",
        }
    }
}

impl std::str::FromStr for CountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-pair" => Ok(CountingMode::PerPair),
            "nearest-per-item" | "nearest" => Ok(CountingMode::NearestPerItem),
            other => Err(Error::Config(format!("unknown counting mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrProportions {
    pub mode: CountingMode,
    pub counts: ClassCounts,
    pub lists: u64,
    /// Lists whose sample id is not in the sample set.
    pub skipped: u64,
}

impl CrProportions {
    pub fn observations(&self) -> u64 {
        self.counts.total()
    }

    pub fn proportion(&self, class: CrClass) -> Option<f64> {
        let total = self.observations();
        (total > 0).then(|| self.counts.get(class) as f64 / total as f64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema_version": 1,
            "mode": self.mode.name(),
            "max_hop": self.counts.max_hop(),
            "lists": self.lists,
            "skipped_records": self.skipped,
            "observations": self.observations(),
            "classes": self.counts.to_json_counts(),
            "proportions": self.counts.to_json_proportions(self.observations(), |_| true),
        })
    }
}

/// Relation classes between predicted items and the prefix they were
/// predicted for. Pairs where the predicted item equals the prefix item are
/// not counted.
pub fn prediction_cr_proportions(
    g: &GlobalGraph,
    preds: &PredictionSet,
    samples: &SampleSet,
    max_hop: usize,
    mode: CountingMode,
) -> Result<CrProportions> {
    let lists: Vec<(u32, &[u32])> = preds.iter().collect();
    let per_list = lists
        .par_iter()
        .map_init(
            || CrResolver::new(g, max_hop),
            |resolver, &(id, predicted)| -> Result<Option<ClassCounts>> {
                let Some(sample) = samples.get(id) else {
                    return Ok(None);
                };
                let mut counts = ClassCounts::new(max_hop);
                for &y in predicted {
                    let classes =
                        resolver.classify_from(y, &sample.prefix, CrClass::Disconnected)?;
                    let distinct = sample
                        .prefix
                        .iter()
                        .zip(classes)
                        .filter(|(&x, _)| x != y)
                        .map(|(_, c)| c);
                    match mode {
                        CountingMode::PerPair => distinct.for_each(|c| counts.add(c, 1)),
                        CountingMode::NearestPerItem => {
                            if let Some(c) = distinct.min() {
                                counts.add(c, 1);
                            }
                        }
                    }
                }
                Ok(Some(counts))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut counts = ClassCounts::new(max_hop);
    let mut skipped = 0;
    for c in &per_list {
        match c {
            Some(c) => counts = counts.merge(c),
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} prediction lists reference unknown samples");
    }
    Ok(CrProportions {
        mode,
        counts,
        lists: per_list.len() as u64 - skipped,
        skipped,
    })
}

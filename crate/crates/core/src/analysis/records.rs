use std::io::Write;

use rayon::prelude::*;
use serde_json::json;

use crate::crgraph::{ClassCounts, CrClass, CrResolver, GlobalGraph};
use crate::ingest::SampleSet;
use crate::Result;

/// Class recorded when a prefix item is the label itself (a repeat).
pub const SELF_PAIR_CLASS: CrClass = CrClass::Hop(0);

/// Relations between a sample's label and each of its prefix items, in
/// prefix order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCrRecord {
    pub sample_id: u32,
    pub crs: Vec<CrClass>,
}

/// Per-pair class counts over all records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCrDistribution {
    pub counts: ClassCounts,
    pub n_samples: u64,
    /// Samples whose label is disconnected from every prefix item.
    pub samples_without_relation: u64,
}

impl LabelCrDistribution {
    pub fn n_pairs(&self) -> u64 {
        self.counts.total()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema_version": 1,
            "counting": "per-pair",
            "max_hop": self.counts.max_hop(),
            "samples": self.n_samples,
            "pairs": self.n_pairs(),
            "samples_without_relation": self.samples_without_relation,
            "classes": self.counts.to_json_counts(),
            "proportions": self.counts.to_json_proportions(self.n_pairs(), |_| true),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCrAnalysis {
    pub records: Vec<LabelCrRecord>,
    pub distribution: LabelCrDistribution,
}

/// Classifies every (label, prefix item) pair of every sample.
///
/// One capped search per sample, parallel over samples; records come back
/// in sample order.
pub fn label_cr_records(
    g: &GlobalGraph,
    samples: &SampleSet,
    max_hop: usize,
) -> Result<LabelCrAnalysis> {
    let records = samples
        .samples
        .par_iter()
        .map_init(
            || CrResolver::new(g, max_hop),
            |resolver, s| {
                resolver
                    .classify_from(s.label, &s.prefix, SELF_PAIR_CLASS)
                    .map(|crs| LabelCrRecord {
                        sample_id: s.id,
                        crs,
                    })
            },
        )
        .collect::<Result<Vec<_>>>()?;
    let mut counts = ClassCounts::new(max_hop);
    let mut samples_without_relation = 0;
    for r in &records {
        for &c in &r.crs {
            counts.add(c, 1);
        }
        if !r.crs.is_empty() && r.crs.iter().all(|&c| c == CrClass::Disconnected) {
            samples_without_relation += 1;
        }
    }
    Ok(LabelCrAnalysis {
        distribution: LabelCrDistribution {
            counts,
            n_samples: records.len() as u64,
            samples_without_relation,
        },
        records,
    })
}

/// Writes `sample_id<TAB>class,class,...` lines for auditing.
pub fn write_records_tsv<W: Write>(w: &mut W, records: &[LabelCrRecord]) -> Result<()> {
    writeln!(w, "sample_id\tcrs")?;
    for r in records {
        let crs: Vec<String> = r.crs.iter().map(CrClass::key).collect();
        writeln!(w, "{}\t{}", r.sample_id, crs.join(","))?;
    }
    Ok(())
}

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::{tally_ranks, to_f64, RankTally};
use super::{DEFAULT_K, DEFAULT_MIN_SLICE_SAMPLES};
use crate::analysis::{PredictionSet, SlicePartition};
use crate::ingest::SampleSet;

/// Name of the pseudo-slice covering every sample.
pub const OVERALL: &str = "overall";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    pub k: usize,
    /// Slices with fewer samples are flagged low-confidence.
    pub min_slice_samples: u64,
    pub model: String,
    pub dataset: String,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k: DEFAULT_K,
            min_slice_samples: DEFAULT_MIN_SLICE_SAMPLES,
            model: String::new(),
            dataset: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceMetrics {
    pub name: String,
    pub samples: u64,
    pub hits: u64,
    pub missing_predictions: u64,
    pub prec_at_k: Option<f64>,
    pub mrr_at_k: Option<f64>,
    /// Exact values as `numerator/denominator`.
    pub prec_exact: Option<String>,
    pub mrr_exact: Option<String>,
    pub low_confidence: bool,
}

impl SliceMetrics {
    fn from_tally(name: &str, t: &RankTally, min_samples: u64) -> Self {
        let prec = t.precision();
        let mrr = t.mrr();
        SliceMetrics {
            name: name.to_string(),
            samples: t.samples,
            hits: t.hits(),
            missing_predictions: t.missing,
            prec_at_k: prec.as_ref().map(to_f64),
            mrr_at_k: mrr.as_ref().map(to_f64),
            prec_exact: prec.map(|r| r.to_string()),
            mrr_exact: mrr.map(|r| r.to_string()),
            low_confidence: t.samples < min_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub model: String,
    pub dataset: String,
    pub k: usize,
    pub slices: Vec<SliceMetrics>,
}

fn percent(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.2}", 100.0 * v))
}

impl MetricsReport {
    pub fn slice(&self, name: &str) -> Option<&SliceMetrics> {
        self.slices.iter().find(|s| s.name == name)
    }

    pub fn overall(&self) -> &SliceMetrics {
        self.slice(OVERALL).expect("reports always carry the overall slice")
    }

    /// Aligned plain-text table with percentages to two decimals.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "model: {}  dataset: {}  k: {}", self.model, self.dataset, self.k);
        let width = self
            .slices
            .iter()
            .map(|s| s.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>8}  {:>8}",
            "slice",
            "samples",
            format!("Prec@{}", self.k),
            format!("MRR@{}", self.k),
        );
        for s in &self.slices {
            let _ = writeln!(
                out,
                "{:<width$}  {:>8}  {:>8}  {:>8}{}",
                s.name,
                s.samples,
                percent(s.prec_at_k),
                percent(s.mrr_at_k),
                if s.low_confidence { "  (low confidence)" } else { "" },
            );
        }
        out
    }
}

/// Metrics over all samples followed by every slice of every partition.
pub fn evaluate_slices(
    preds: &PredictionSet,
    samples: &SampleSet,
    partitions: &[&SlicePartition],
    opts: &EvalOptions,
) -> MetricsReport {
    let overall = tally_ranks(preds, samples.iter(), opts.k);
    let mut slices = vec![SliceMetrics::from_tally(OVERALL, &overall, opts.min_slice_samples)];
    for partition in partitions {
        for slice in &partition.slices {
            let members = slice.sample_ids.iter().filter_map(|&id| {
                let s = samples.get(id);
                debug_assert!(s.is_some(), "slice {} references unknown sample {id}", slice.name);
                s
            });
            let t = tally_ranks(preds, members, opts.k);
            slices.push(SliceMetrics::from_tally(&slice.name, &t, opts.min_slice_samples));
        }
    }
    MetricsReport {
        schema_version: 1,
        model: opts.model.clone(),
        dataset: opts.dataset.clone(),
        k: opts.k,
        slices,
    }
}

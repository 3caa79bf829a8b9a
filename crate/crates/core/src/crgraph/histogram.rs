use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::json;

use super::{bfs::BfsScratch, ClassCounts, CrClass, GlobalGraph};
use crate::{Error, Result};

/// Denominator used when turning pair counts into percentages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PercentBase {
    /// All `n(n-1)/2` pairs, disconnected ones included.
    AllPairs,
    /// Only pairs joined by some path.
    #[default]
    WithRelation,
}

impl std::str::FromStr for PercentBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-pairs" => Ok(PercentBase::AllPairs),
            "with-relation" => Ok(PercentBase::WithRelation),
            other => Err(Error::Config(format!("unknown percent base {other:?}"))),
        }
    }
}

impl PercentBase {
    pub fn name(self) -> &'static str {
        match self {
            PercentBase::AllPairs => "all-pairs",
            PercentBase::WithRelation => "with-relation",
        }
    }
}

/// Unordered item pairs per relation class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrHistogram {
    pub counts: ClassCounts,
    pub total_pairs: u64,
}

impl CrHistogram {
    pub fn max_hop(&self) -> usize {
        self.counts.max_hop()
    }

    pub fn get(&self, class: CrClass) -> u64 {
        self.counts.get(class)
    }

    pub fn with_relation(&self) -> u64 {
        self.total_pairs - self.get(CrClass::Disconnected)
    }

    /// Share of `class` in percent, `None` for an empty denominator.
    pub fn percent(&self, class: CrClass, base: PercentBase) -> Option<f64> {
        let denom = match base {
            PercentBase::AllPairs => self.total_pairs,
            PercentBase::WithRelation => {
                if class == CrClass::Disconnected {
                    return None;
                }
                self.with_relation()
            }
        };
        (denom > 0).then(|| 100.0 * self.get(class) as f64 / denom as f64)
    }

    pub fn to_json(&self, base: PercentBase) -> serde_json::Value {
        json!({
            "schema_version": 1,
            "max_hop": self.max_hop(),
            "classes": self.counts.to_json_counts(),
            "total_pairs": self.total_pairs,
            "percent_base": base.name(),
            "proportions_all_pairs": self.counts.to_json_proportions(self.total_pairs, |_| true),
            "proportions_with_relation": self
                .counts
                .to_json_proportions(self.with_relation(), |c| c != CrClass::Disconnected),
        })
    }
}

fn finish(g: &GlobalGraph, max_hop: usize, ordered_hop_pairs: &[u64]) -> CrHistogram {
    let mut counts = ClassCounts::new(max_hop);
    let mut within = 0;
    for (h, &ordered) in ordered_hop_pairs.iter().enumerate() {
        debug_assert_eq!(ordered % 2, 0, "ordered pair counts are symmetric");
        counts.add(CrClass::Hop(h as u32), ordered / 2);
        within += ordered / 2;
    }
    let connected = g.connected_pairs();
    counts.add(CrClass::Others, connected - within);
    counts.add(CrClass::Disconnected, g.total_pairs() - connected);
    CrHistogram {
        counts,
        total_pairs: g.total_pairs(),
    }
}

/// Pair histogram from one capped breadth-first search per source.
///
/// Reference implementation for [`pair_class_histogram`].
pub fn pair_class_histogram_by_frontiers(g: &GlobalGraph, max_hop: usize) -> CrHistogram {
    assert!(max_hop >= 1);
    let per_depth = (0..g.n() as u32)
        .into_par_iter()
        .map_init(
            || BfsScratch::new(g.n()),
            |scratch, source| {
                let mut counts = vec![0u64; max_hop];
                scratch.run(g, source, max_hop as u32, |_, d| {
                    counts[d as usize - 1] += 1;
                    false
                });
                counts
            },
        )
        .reduce(|| vec![0u64; max_hop], add_vectors);
    finish(g, max_hop, &per_depth)
}

fn add_vectors(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

const LANES: usize = 64;

/// Pair histogram with `max_hop` explicit hop classes.
///
/// Runs 64 breadth-first searches at once, one per bit of a `u64` lane
/// mask, expanding each level bottom-up: a node's next-level mask is the
/// union of its neighbours' frontier masks minus what it has already seen.
/// Depths beyond `max_hop` are never expanded; `Others` and `Disconnected`
/// come from connected-component sizes. Batches run in parallel and are
/// summed as integers, so the result is independent of scheduling.
pub fn pair_class_histogram(g: &GlobalGraph, max_hop: usize) -> CrHistogram {
    assert!(max_hop >= 1);
    let n = g.n();
    let batches = n.div_ceil(LANES);
    let per_depth = (0..batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * LANES;
            let hi = (lo + LANES).min(n);
            count_batch(g, lo, hi, max_hop)
        })
        .reduce(|| vec![0u64; max_hop], add_vectors);
    finish(g, max_hop, &per_depth)
}

fn count_batch(g: &GlobalGraph, lo: usize, hi: usize, max_hop: usize) -> Vec<u64> {
    let n = g.n();
    let full: u64 = if hi - lo == LANES {
        u64::MAX
    } else {
        (1u64 << (hi - lo)) - 1
    };
    let mut seen = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    for s in lo..hi {
        seen[s] |= 1 << (s - lo);
        frontier[s] |= 1 << (s - lo);
    }
    let mut counts = vec![0u64; max_hop];
    for count in counts.iter_mut() {
        let mut any = 0u64;
        for v in 0..n {
            let seen_v = seen[v];
            if seen_v == full {
                next[v] = 0;
                continue;
            }
            let mut acc = 0u64;
            for &w in g.neighbors(v as u32) {
                acc |= frontier[w as usize];
            }
            let fresh = acc & !seen_v;
            next[v] = fresh;
            any |= fresh;
            *count += fresh.count_ones() as u64;
        }
        if any == 0 {
            break;
        }
        for v in 0..n {
            seen[v] |= next[v];
        }
        std::mem::swap(&mut frontier, &mut next);
    }
    counts
}

/// Number of edges per co-occurrence count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoocHistogram {
    pub buckets: BTreeMap<u32, u64>,
}

impl CoocHistogram {
    pub fn total(&self) -> u64 {
        self.buckets.values().sum()
    }

    /// Most common co-occurrence count (smallest on ties).
    pub fn mode(&self) -> Option<u32> {
        self.buckets
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&f, _)| f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let buckets: Vec<_> = self
            .buckets
            .iter()
            .map(|(f, c)| json!({"frequency": f, "pairs": c}))
            .collect();
        json!({
            "schema_version": 1,
            "edges": self.total(),
            "buckets": buckets,
        })
    }
}

pub fn cooc_frequency_histogram(g: &GlobalGraph) -> CoocHistogram {
    let mut buckets = BTreeMap::new();
    for (_, _, c) in g.edges() {
        *buckets.entry(c).or_insert(0) += 1;
    }
    CoocHistogram { buckets }
}

use serde::{Deserialize, Serialize};

use super::sequences::compact;
use super::{Sequence, SequenceSet};
use crate::{Error, Result};

/// Train/valid/test proportions, e.g. `7:2:1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRatios(pub [u32; 3]);

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios([7, 2, 1])
    }
}

impl std::str::FromStr for SplitRatios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split([':', ',']).map(str::trim).collect();
        let bad = || Error::Config(format!("split ratios must look like 7:2:1, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut out = [0u32; 3];
        for (slot, p) in out.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| bad())?;
        }
        if out.contains(&0) {
            return Err(Error::Config("split ratios must be positive".into()));
        }
        Ok(SplitRatios(out))
    }
}

impl std::fmt::Display for SplitRatios {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.0[0], self.0[1], self.0[2])
    }
}

impl SplitRatios {
    /// Cumulative cut points over `n` sequences, rounded to nearest.
    fn boundaries(&self, n: usize) -> (usize, usize) {
        let total: u64 = self.0.iter().map(|&r| r as u64).sum();
        let cut = |upto: u64| ((n as u64 * upto * 2 + total) / (total * 2)) as usize;
        (cut(self.0[0] as u64), cut((self.0[0] + self.0[1]) as u64))
    }
}

/// A leave-last-out evaluation sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: u32,
    pub prefix: Vec<u32>,
    pub label: u32,
    pub origin_end_time: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Looks a sample up by id. Ids are dense, so this is usually direct.
    pub fn get(&self, id: u32) -> Option<&Sample> {
        match self.samples.get(id as usize) {
            Some(s) if s.id == id => Some(s),
            _ => self.samples.iter().find(|s| s.id == id),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sample> {
        self.samples.iter()
    }
}

/// Training sequences plus evaluation samples expressed in the training
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: SequenceSet,
    pub valid: SampleSet,
    pub test: SampleSet,
}

/// Orders sequences by end time and cuts them into train, valid and test.
///
/// The training vocabulary is re-densified to items seen in training.
/// Validation and test sequences become leave-last-out samples: unseen
/// prefix items are removed, and a sample is dropped when its label is
/// unseen or its prefix ends up empty.
pub fn split_chronological(data: &SequenceSet, ratios: SplitRatios) -> Result<DatasetSplit> {
    let mut order: Vec<&Sequence> = data.sequences.iter().collect();
    order.sort_by_key(|s| (s.end_time, s.id));
    let (b1, b2) = ratios.boundaries(order.len());
    if b1 == 0 {
        return Err(Error::EmptyTrain);
    }

    let train_raw = SequenceSet::new(
        order[..b1].iter().map(|s| (*s).clone()).collect(),
        data.vocab.clone(),
    )?;
    let train_full_vocab_counts = train_raw.counts.clone();
    let train = compact(&train_raw);
    let mut remap = vec![None; data.n_items()];
    let mut next = 0u32;
    for (old, &c) in train_full_vocab_counts.iter().enumerate() {
        if c > 0 {
            remap[old] = Some(next);
            next += 1;
        }
    }
    let to_samples = |seqs: &[&Sequence]| {
        let mut samples = Vec::new();
        for seq in seqs {
            let Some((&last, prefix)) = seq.items.split_last() else {
                continue;
            };
            let Some(label) = remap[last as usize] else {
                continue;
            };
            let prefix: Vec<u32> = prefix.iter().filter_map(|&i| remap[i as usize]).collect();
            if prefix.is_empty() {
                continue;
            }
            samples.push(Sample {
                id: samples.len() as u32,
                prefix,
                label,
                origin_end_time: seq.end_time,
            });
        }
        SampleSet { samples }
    };
    Ok(DatasetSplit {
        valid: to_samples(&order[b1..b2]),
        test: to_samples(&order[b2..]),
        train,
    })
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Event, SECONDS_PER_DAY};
use crate::{Error, Result};

/// Bidirectional map between opaque item ids and dense indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    ids: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids<I: IntoIterator<Item = String>>(ids: I) -> Result<Self> {
        let mut vocab = Vocab::new();
        for id in ids {
            let before = vocab.len();
            vocab.intern(&id);
            if vocab.len() == before {
                return Err(Error::Data(format!("duplicate vocabulary entry {id:?}")));
            }
        }
        Ok(vocab)
    }

    /// Returns the index of `id`, assigning the next free one if unseen.
    pub fn intern(&mut self, id: &str) -> u32 {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        i
    }

    pub fn encode(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn decode(&self, index: u32) -> Option<&str> {
        self.ids.get(index as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    pub id: u32,
    pub items: Vec<u32>,
    /// Timestamp of the last event.
    pub end_time: i64,
}

impl Sequence {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    pub sequences: Vec<Sequence>,
    pub vocab: Vocab,
    /// Interaction count per dense item index.
    pub counts: Vec<u64>,
}

impl SequenceSet {
    /// Builds a set from already-dense sequences, recomputing `counts`.
    pub fn new(sequences: Vec<Sequence>, vocab: Vocab) -> Result<Self> {
        let mut counts = vec![0u64; vocab.len()];
        for seq in &sequences {
            for &item in &seq.items {
                let slot = counts.get_mut(item as usize).ok_or(Error::ItemOutOfRange {
                    index: item,
                    n: vocab.len(),
                })?;
                *slot += 1;
            }
        }
        Ok(SequenceSet {
            sequences,
            vocab,
            counts,
        })
    }

    /// Convenience constructor from opaque ids, one inner vector per
    /// sequence. End times are the sequence positions.
    pub fn from_id_lists<S: AsRef<str>>(lists: &[Vec<S>]) -> Self {
        let mut vocab = Vocab::new();
        let sequences = lists
            .iter()
            .enumerate()
            .map(|(i, list)| Sequence {
                id: i as u32,
                items: list.iter().map(|s| vocab.intern(s.as_ref())).collect(),
                end_time: i as i64,
            })
            .collect();
        SequenceSet::new(sequences, vocab).expect("interned ids are in range")
    }

    pub fn n_items(&self) -> usize {
        self.vocab.len()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn n_interactions(&self) -> u64 {
        self.sequences.iter().map(|s| s.items.len() as u64).sum()
    }

    /// Sequences as opaque-id lists, mostly for tests and diagnostics.
    pub fn decoded(&self) -> Vec<Vec<&str>> {
        self.sequences
            .iter()
            .map(|s| {
                s.items
                    .iter()
                    .map(|&i| self.vocab.decode(i).unwrap_or("?"))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// One sequence per session id.
    #[default]
    Session,
    /// One sequence per (session id, UTC day).
    SessionPerDay,
}

impl std::str::FromStr for Grouping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "session" => Ok(Grouping::Session),
            "session-per-day" | "per-day" => Ok(Grouping::SessionPerDay),
            other => Err(Error::Config(format!("unknown grouping {other:?}"))),
        }
    }
}

/// Groups events into sequences ordered by timestamp.
///
/// Sequence ids follow the first appearance of each group in the input and
/// vocabulary indices follow the first appearance of each item. Events with
/// equal timestamps keep their input order.
pub fn build_sequences(events: &[Event], grouping: Grouping) -> Result<SequenceSet> {
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    let mut vocab = Vocab::new();
    let mut group_of: HashMap<(&str, i64), usize> = HashMap::new();
    let mut groups: Vec<Vec<(i64, u32)>> = Vec::new();
    for ev in events {
        let day = match grouping {
            Grouping::Session => 0,
            Grouping::SessionPerDay => ev.timestamp.div_euclid(SECONDS_PER_DAY),
        };
        let item = vocab.intern(&ev.item_id);
        let g = *group_of
            .entry((ev.session_id.as_str(), day))
            .or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
        groups[g].push((ev.timestamp, item));
    }
    let sequences = groups
        .into_iter()
        .enumerate()
        .map(|(id, mut evs)| {
            evs.sort_by_key(|&(t, _)| t);
            Sequence {
                id: id as u32,
                end_time: evs.last().map(|&(t, _)| t).unwrap_or_default(),
                items: evs.into_iter().map(|(_, i)| i).collect(),
            }
        })
        .collect();
    SequenceSet::new(sequences, vocab)
}

/// Drops rare items, then short sequences, in a single pass.
///
/// Items whose interaction count is below `min_item_freq` are removed from
/// every sequence; sequences left shorter than `min_len` are dropped. The
/// surviving items are re-indexed keeping their relative order and the
/// surviving sequences are renumbered `0..`.
pub fn preprocess(raw: &SequenceSet, min_item_freq: u64, min_len: usize) -> Result<SequenceSet> {
    if min_item_freq < 1 {
        return Err(Error::Config("min_item_freq must be at least 1".into()));
    }
    if min_len < 2 {
        return Err(Error::Config("min_len must be at least 2".into()));
    }
    let keep: Vec<bool> = raw.counts.iter().map(|&c| c >= min_item_freq).collect();
    let mut remap = vec![u32::MAX; raw.n_items()];
    let mut vocab = Vocab::new();
    for (old, id) in raw.vocab.ids().iter().enumerate() {
        if keep[old] {
            remap[old] = vocab.intern(id);
        }
    }
    let mut sequences = Vec::new();
    for seq in &raw.sequences {
        let items: Vec<u32> = seq
            .items
            .iter()
            .filter(|&&i| keep[i as usize])
            .map(|&i| remap[i as usize])
            .collect();
        if items.len() >= min_len {
            sequences.push(Sequence {
                id: sequences.len() as u32,
                items,
                end_time: seq.end_time,
            });
        }
    }
    if sequences.is_empty() {
        return Err(Error::DatasetExhausted);
    }
    // Items whose every sequence was dropped leave the vocabulary too.
    let set = SequenceSet::new(sequences, vocab)?;
    Ok(compact(&set))
}

/// Re-densifies the vocabulary to the items that actually occur.
pub(crate) fn compact(set: &SequenceSet) -> SequenceSet {
    if set.counts.iter().all(|&c| c > 0) {
        return set.clone();
    }
    let mut remap = vec![u32::MAX; set.n_items()];
    let mut vocab = Vocab::new();
    for (old, id) in set.vocab.ids().iter().enumerate() {
        if set.counts[old] > 0 {
            remap[old] = vocab.intern(id);
        }
    }
    let sequences = set
        .sequences
        .iter()
        .map(|s| Sequence {
            id: s.id,
            items: s.items.iter().map(|&i| remap[i as usize]).collect(),
            end_time: s.end_time,
        })
        .collect();
    SequenceSet::new(sequences, vocab).expect("remapped ids are in range")
}

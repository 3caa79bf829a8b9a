use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;

use crate::ingest::{RowError, Vocab};
use crate::{Error, Result};

/// Top-k recommendation lists keyed by sample id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    k: usize,
    lists: BTreeMap<u32, Vec<u32>>,
}

impl PredictionSet {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        PredictionSet {
            k,
            lists: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Adds a list of exactly `k` distinct items below `n_items`.
    pub fn insert(&mut self, sample_id: u32, items: Vec<u32>, n_items: usize) -> Result<()> {
        if items.len() != self.k {
            return Err(Error::Data(format!(
                "sample {sample_id}: expected {} items, got {}",
                self.k,
                items.len()
            )));
        }
        if let Some(&bad) = items.iter().find(|&&i| i as usize >= n_items) {
            return Err(Error::ItemOutOfRange {
                index: bad,
                n: n_items,
            });
        }
        let mut sorted = items.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Data(format!("sample {sample_id}: duplicate items")));
        }
        if self.lists.insert(sample_id, items).is_some() {
            return Err(Error::Data(format!("sample {sample_id}: listed twice")));
        }
        Ok(())
    }

    pub fn get(&self, sample_id: u32) -> Option<&[u32]> {
        self.lists.get(&sample_id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Lists in ascending sample id order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.lists.iter().map(|(&id, l)| (id, l.as_slice()))
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PredictionFileReport {
    /// Non-empty lines read.
    pub lines: usize,
    pub errors: Vec<RowError>,
}

impl PredictionFileReport {
    pub fn error_rate(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.errors.len() as f64 / self.lines as f64
        }
    }
}

/// Reads `sample_id<TAB>item,item,...` lines with opaque item ids.
///
/// Lines that fail to parse, reference unknown items or do not hold exactly
/// `k` distinct items are skipped and reported.
pub fn read_prediction_file<R: BufRead>(
    input: R,
    vocab: &Vocab,
    k: usize,
) -> Result<(PredictionSet, PredictionFileReport)> {
    let mut preds = PredictionSet::new(k);
    let mut report = PredictionFileReport::default();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        report.lines += 1;
        let mut fail = |reason: String| {
            report.errors.push(RowError {
                line: idx + 1,
                reason,
            })
        };
        let Some((id, items)) = line.split_once('\t') else {
            fail("missing tab separator".into());
            continue;
        };
        let Ok(sample_id) = id.trim().parse::<u32>() else {
            fail(format!("bad sample id {id:?}"));
            continue;
        };
        let resolved: Option<Vec<u32>> = items
            .split(',')
            .map(|s| vocab.encode(s.trim()))
            .collect();
        let Some(resolved) = resolved else {
            fail("unknown item id".into());
            continue;
        };
        if let Err(e) = preds.insert(sample_id, resolved, vocab.len()) {
            fail(e.to_string());
        }
    }
    Ok((preds, report))
}

pub fn write_prediction_file<W: Write>(w: &mut W, preds: &PredictionSet, vocab: &Vocab) -> Result<()> {
    for (id, list) in preds.iter() {
        let ids: Vec<&str> = list
            .iter()
            .map(|&i| {
                vocab.decode(i).ok_or(Error::ItemOutOfRange {
                    index: i,
                    n: vocab.len(),
                })
            })
            .collect::<Result<_>>()?;
        writeln!(w, "{id}\t{}", ids.join(","))?;
    }
    Ok(())
}

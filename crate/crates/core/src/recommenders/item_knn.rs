use std::io::{Read, Write};

use super::Recommender;
use crate::crgraph::{build_global_graph, GlobalGraph};
use crate::ingest::SequenceSet;
use crate::io::*;
use crate::{Result, Scalar};

pub const DEFAULT_ITEM_NEIGHBORS: usize = 100;

const MAGIC: &[u8; 4] = b"IKN1";

/// Last-item neighbourhood model with cosine similarity over binary
/// sequence membership: `cooc(i, j) / sqrt(freq(i) * freq(j))`, where
/// `freq` counts the training sequences containing an item.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemKnnModel<T> {
    offsets: Vec<u64>,
    neighbors: Vec<u32>,
    sims: Vec<T>,
}

impl<T: Scalar> ItemKnnModel<T> {
    /// Keeps the `max_neighbors` most similar items per item (ties by
    /// ascending index).
    pub fn from_graph(g: &GlobalGraph, freq: &[u32], max_neighbors: usize) -> Self {
        assert_eq!(freq.len(), g.n());
        let mut offsets = vec![0u64];
        let mut neighbors = Vec::new();
        let mut sims = Vec::new();
        let mut row: Vec<(u32, f64)> = Vec::new();
        for i in 0..g.n() as u32 {
            row.clear();
            let fi = freq[i as usize] as f64;
            for (&j, &c) in g.neighbors(i).iter().zip(g.cooc_row(i)) {
                row.push((j, c as f64 / (fi * freq[j as usize] as f64).sqrt()));
            }
            row.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            row.truncate(max_neighbors);
            for &(j, s) in &row {
                neighbors.push(j);
                sims.push(T::from_f64_lossy(s));
            }
            offsets.push(neighbors.len() as u64);
        }
        ItemKnnModel {
            offsets,
            neighbors,
            sims,
        }
    }

    /// Stored neighbours of `i`, most similar first.
    pub fn neighbors(&self, i: u32) -> impl Iterator<Item = (u32, T)> + '_ {
        let (lo, hi) = (
            self.offsets[i as usize] as usize,
            self.offsets[i as usize + 1] as usize,
        );
        self.neighbors[lo..hi]
            .iter()
            .copied()
            .zip(self.sims[lo..hi].iter().copied())
    }

    pub fn similarity(&self, i: u32, j: u32) -> Option<T> {
        self.neighbors(i).find(|&(n, _)| n == j).map(|(_, s)| s)
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, len_u32(self.offsets.len() - 1)?)?;
        write_u64(w, self.neighbors.len() as u64)?;
        for &o in &self.offsets {
            write_u64(w, o)?;
        }
        for (&j, &s) in self.neighbors.iter().zip(&self.sims) {
            write_u32(w, j)?;
            write_f64(w, s.to_f64_lossless())?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<Self> {
        expect_magic(r, MAGIC)?;
        let n = read_u32(r)? as usize;
        let entries = read_u64(r)? as usize;
        let offsets = (0..=n).map(|_| read_u64(r)).collect::<Result<Vec<_>>>()?;
        if offsets.last().copied() != Some(entries as u64) {
            return Err(crate::Error::Cache("item-knn offsets disagree with entry count".into()));
        }
        let mut neighbors = Vec::with_capacity(entries);
        let mut sims = Vec::with_capacity(entries);
        for _ in 0..entries {
            neighbors.push(read_u32(r)?);
            sims.push(T::from_f64_lossy(read_f64(r)?));
        }
        Ok(ItemKnnModel {
            offsets,
            neighbors,
            sims,
        })
    }
}

/// Number of sequences containing each item.
pub(crate) fn sequence_frequency(train: &SequenceSet) -> Vec<u32> {
    let mut freq = vec![0u32; train.n_items()];
    let mut seen: Vec<u32> = Vec::new();
    for seq in &train.sequences {
        seen.clear();
        seen.extend_from_slice(&seq.items);
        seen.sort_unstable();
        seen.dedup();
        for &i in &seen {
            freq[i as usize] += 1;
        }
    }
    freq
}

pub fn train_item_knn<T: Scalar>(train: &SequenceSet, max_neighbors: usize) -> ItemKnnModel<T> {
    let g = build_global_graph(train);
    ItemKnnModel::from_graph(&g, &sequence_frequency(train), max_neighbors)
}

impl<T: Scalar> Recommender<T> for ItemKnnModel<T> {
    fn n_items(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Scores candidates by similarity to the last prefix item only.
    fn score_into(&self, prefix: &[u32], scores: &mut [T]) {
        scores.fill(T::zero());
        let Some(&last) = prefix.last() else {
            return;
        };
        for (j, s) in self.neighbors(last) {
            scores[j as usize] = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recommenders::recommend_topk;

    fn toy() -> SequenceSet {
        SequenceSet::from_id_lists(&[
            vec!["x1", "x2", "x3"],
            vec!["x3", "x5"],
            vec!["x2", "x4"],
            vec!["x4", "x6"],
        ])
    }

    #[test]
    fn toy_similarities() {
        let set = toy();
        let m: ItemKnnModel<f64> = train_item_knn(&set, 100);
        let id = |s| set.vocab.encode(s).unwrap();
        assert!((m.similarity(id("x2"), id("x3")).unwrap() - 0.5).abs() < 1e-12);
        assert!((m.similarity(id("x1"), id("x2")).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.similarity(id("x1"), id("x6")), None);
    }

    #[test]
    fn last_item_scoring() {
        let set = toy();
        let m: ItemKnnModel<f64> = train_item_knn(&set, 100);
        let id = |s| set.vocab.encode(s).unwrap();
        let rec = recommend_topk(&m, &[id("x6"), id("x3")], 3);
        assert_eq!(rec.items, vec![id("x1"), id("x5"), id("x2")]);
        assert!((rec.scores[0] - 0.5f64.sqrt()).abs() < 1e-12);
        let scores = m.scores(&[id("x6")]);
        let nonzero: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] != 0.0).collect();
        assert_eq!(nonzero, vec![id("x4") as usize]);
        assert!(scores.iter().all(|s| s.is_finite()));
    }

    #[test]
    fn neighbor_cap() {
        let set = toy();
        let m: ItemKnnModel<f32> = train_item_knn(&set, 1);
        let x3 = set.vocab.encode("x3").unwrap();
        assert_eq!(m.neighbors(x3).count(), 1);
    }

    #[test]
    fn cache_round_trip() {
        let m: ItemKnnModel<f32> = train_item_knn(&toy(), 100);
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"IKN1");
        assert_eq!(ItemKnnModel::<f32>::read(&mut buf.as_slice()).unwrap(), m);
    }
}

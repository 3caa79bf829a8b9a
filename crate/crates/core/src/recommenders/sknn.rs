use std::io::{Read, Write};

use super::Recommender;
use crate::ingest::SequenceSet;
use crate::io::*;
use crate::{Error, Result, Scalar};

const MAGIC: &[u8; 4] = b"SKN1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SknnConfig {
    /// Neighbour sessions used for scoring.
    pub k_neighbors: usize,
    /// Only the most recent candidate sessions are compared.
    pub m_recent: usize,
}

impl Default for SknnConfig {
    fn default() -> Self {
        SknnConfig {
            k_neighbors: 500,
            m_recent: 5000,
        }
    }
}

/// Session-based kNN over binary item sets.
///
/// Candidate neighbours are the training sequences sharing at least one item
/// with the prefix, restricted to the `m_recent` most recent. The `k`
/// candidates with the highest cosine similarity vote for their items with
/// that similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct SknnModel<T> {
    config: SknnConfig,
    n_items: usize,
    /// Distinct items per training sequence, ascending.
    sets: Vec<Vec<u32>>,
    end_times: Vec<i64>,
    /// 0 for the most recent sequence; ties by ascending sequence id.
    recency: Vec<u32>,
    postings: Vec<Vec<u32>>,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Scalar> SknnModel<T> {
    fn assemble(config: SknnConfig, n_items: usize, sets: Vec<Vec<u32>>, end_times: Vec<i64>) -> Result<Self> {
        if config.k_neighbors == 0 || config.m_recent == 0 {
            return Err(Error::Config("sknn k and m_recent must be at least 1".into()));
        }
        let mut postings = vec![Vec::new(); n_items];
        for (s, items) in sets.iter().enumerate() {
            for &i in items {
                let list = postings.get_mut(i as usize).ok_or(Error::ItemOutOfRange {
                    index: i,
                    n: n_items,
                })?;
                list.push(s as u32);
            }
        }
        let mut by_recency: Vec<u32> = (0..sets.len() as u32).collect();
        by_recency.sort_by_key(|&s| (std::cmp::Reverse(end_times[s as usize]), s));
        let mut recency = vec![0u32; sets.len()];
        for (rank, &s) in by_recency.iter().enumerate() {
            recency[s as usize] = rank as u32;
        }
        Ok(SknnModel {
            config,
            n_items,
            sets,
            end_times,
            recency,
            postings,
            _scalar: std::marker::PhantomData,
        })
    }

    pub fn config(&self) -> SknnConfig {
        self.config
    }

    /// Neighbour sequences of `prefix` with their similarity, best first
    /// (ties by ascending sequence id).
    pub fn neighbors(&self, prefix: &[u32]) -> Vec<(u32, T)> {
        let mut query: Vec<u32> = prefix
            .iter()
            .copied()
            .filter(|&i| (i as usize) < self.n_items)
            .collect();
        query.sort_unstable();
        query.dedup();
        if query.is_empty() {
            return Vec::new();
        }
        // Postings are per distinct item, so a sequence's multiplicity in
        // the concatenation is its overlap with the query.
        let mut hits: Vec<u32> = query
            .iter()
            .flat_map(|&i| self.postings[i as usize].iter().copied())
            .collect();
        hits.sort_unstable();
        let mut candidates: Vec<(u32, u32)> = hits
            .chunk_by(|a, b| a == b)
            .map(|run| (run[0], run.len() as u32))
            .collect();
        if candidates.len() > self.config.m_recent {
            let m = self.config.m_recent;
            candidates.select_nth_unstable_by_key(m - 1, |&(s, _)| self.recency[s as usize]);
            candidates.truncate(m);
        }
        let q = query.len() as f64;
        let mut scored: Vec<(u32, f64)> = candidates
            .into_iter()
            .map(|(s, overlap)| {
                let len = self.sets[s as usize].len() as f64;
                (s, overlap as f64 / (q * len).sqrt())
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(self.config.k_neighbors);
        scored
            .into_iter()
            .map(|(s, sim)| (s, T::from_f64_lossy(sim)))
            .collect()
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, len_u32(self.n_items)?)?;
        write_u32(w, len_u32(self.config.k_neighbors)?)?;
        write_u32(w, len_u32(self.config.m_recent)?)?;
        write_u32(w, len_u32(self.sets.len())?)?;
        for (set, &t) in self.sets.iter().zip(&self.end_times) {
            write_i64(w, t)?;
            write_u32(w, len_u32(set.len())?)?;
            for &i in set {
                write_u32(w, i)?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<Self> {
        expect_magic(r, MAGIC)?;
        let n_items = read_u32(r)? as usize;
        let config = SknnConfig {
            k_neighbors: read_u32(r)? as usize,
            m_recent: read_u32(r)? as usize,
        };
        let n = read_u32(r)? as usize;
        let mut sets = Vec::with_capacity(n.min(1 << 20));
        let mut end_times = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            end_times.push(read_i64(r)?);
            let len = read_u32(r)? as usize;
            sets.push((0..len).map(|_| read_u32(r)).collect::<Result<Vec<_>>>()?);
        }
        Self::assemble(config, n_items, sets, end_times)
    }
}

pub fn train_sknn<T: Scalar>(train: &SequenceSet, config: SknnConfig) -> Result<SknnModel<T>> {
    let sets = train
        .sequences
        .iter()
        .map(|s| {
            let mut items = s.items.clone();
            items.sort_unstable();
            items.dedup();
            items
        })
        .collect();
    let end_times = train.sequences.iter().map(|s| s.end_time).collect();
    SknnModel::assemble(config, train.n_items(), sets, end_times)
}

impl<T: Scalar> Recommender<T> for SknnModel<T> {
    fn n_items(&self) -> usize {
        self.n_items
    }

    fn score_into(&self, prefix: &[u32], scores: &mut [T]) {
        scores.fill(T::zero());
        for (s, sim) in self.neighbors(prefix) {
            for &c in &self.sets[s as usize] {
                scores[c as usize] = scores[c as usize] + sim;
            }
        }
    }
}

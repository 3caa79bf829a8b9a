use rayon::prelude::*;

use crate::ingest::SequenceSet;
use crate::{Error, Result};

/// Sequences with more distinct items than this trigger a warning.
pub const DEFAULT_CLIQUE_CAP: usize = 500;

/// Undirected co-occurrence graph in compressed sparse row layout.
///
/// `neighbors[offsets[i]..offsets[i + 1]]` is the strictly increasing
/// neighbour list of item `i`, and `cooc` is aligned with `neighbors`:
/// the number of training sequences containing both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalGraph {
    offsets: Vec<u64>,
    neighbors: Vec<u32>,
    cooc: Vec<u32>,
    component: Vec<u32>,
    component_sizes: Vec<u64>,
}

impl GlobalGraph {
    /// Assembles a graph from CSR arrays, validating every invariant.
    pub fn from_csr(offsets: Vec<u64>, neighbors: Vec<u32>, cooc: Vec<u32>) -> Result<Self> {
        let bad = |msg: String| Err(Error::Data(format!("invalid graph: {msg}")));
        if offsets.first() != Some(&0) {
            return bad("offsets must start at 0".into());
        }
        if *offsets.last().unwrap() as usize != neighbors.len() || neighbors.len() != cooc.len() {
            return bad("array lengths disagree".into());
        }
        let n = offsets.len() - 1;
        for i in 0..n {
            let (lo, hi) = (offsets[i] as usize, offsets[i + 1] as usize);
            if lo > hi {
                return bad(format!("offsets decrease at {i}"));
            }
            let row = &neighbors[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {i} not strictly sorted"));
            }
            if row.iter().any(|&j| j as usize >= n || j as usize == i) {
                return bad(format!("row {i} has a self-loop or out-of-range neighbour"));
            }
            if cooc[lo..hi].contains(&0) {
                return bad(format!("row {i} has a zero co-occurrence count"));
            }
        }
        let mut g = GlobalGraph {
            offsets,
            neighbors,
            cooc,
            component: Vec::new(),
            component_sizes: Vec::new(),
        };
        for i in 0..n as u32 {
            for (&j, &c) in g.neighbors(i).iter().zip(g.cooc_row(i)) {
                if g.edge_cooc(j, i) != Some(c) {
                    return bad(format!("edge {i}-{j} is not symmetric"));
                }
            }
        }
        g.label_components();
        Ok(g)
    }

    /// Builds the graph from dense item lists over `n` items.
    pub fn from_item_lists<'a, I>(n: usize, lists: I, clique_cap: usize) -> Self
    where
        I: IntoIterator<Item = &'a [u32]>,
    {
        let mut pairs: Vec<u64> = Vec::new();
        let mut distinct: Vec<u32> = Vec::new();
        for items in lists {
            distinct.clear();
            distinct.extend_from_slice(items);
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() > clique_cap {
                log::warn!(
                    "sequence with {} distinct items exceeds clique cap {clique_cap}; building full clique",
                    distinct.len()
                );
            }
            for (k, &a) in distinct.iter().enumerate() {
                assert!((a as usize) < n, "item {a} out of range for {n} items");
                for &b in &distinct[k + 1..] {
                    pairs.push(((a as u64) << 32) | b as u64);
                }
            }
        }
        pairs.par_sort_unstable();

        let mut degree = vec![0u64; n + 1];
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for run in pairs.chunk_by(|x, y| x == y) {
            let (a, b) = ((run[0] >> 32) as u32, run[0] as u32);
            edges.push((a, b, run.len() as u32));
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        drop(pairs);

        let mut offsets = vec![0u64; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let total = offsets[n] as usize;
        let mut neighbors = vec![0u32; total];
        let mut cooc = vec![0u32; total];
        let mut cursor: Vec<u64> = offsets[..n].to_vec();
        // Edges are sorted by (a, b) with a < b, so every row is filled in
        // increasing neighbour order: first the smaller endpoints, then the
        // larger ones.
        for &(a, b, c) in &edges {
            for (from, to) in [(a, b), (b, a)] {
                let at = cursor[from as usize] as usize;
                neighbors[at] = to;
                cooc[at] = c;
                cursor[from as usize] += 1;
            }
        }
        let mut g = GlobalGraph {
            offsets,
            neighbors,
            cooc,
            component: Vec::new(),
            component_sizes: Vec::new(),
        };
        g.label_components();
        g
    }

    fn label_components(&mut self) {
        let n = self.n();
        let mut component = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if component[start] != u32::MAX {
                continue;
            }
            let label = sizes.len() as u32;
            component[start] = label;
            stack.push(start as u32);
            let mut size = 0u64;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in self.neighbors(v) {
                    if component[w as usize] == u32::MAX {
                        component[w as usize] = label;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        self.component = component;
        self.component_sizes = sizes;
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn n_edges(&self) -> u64 {
        self.neighbors.len() as u64 / 2
    }

    pub fn degree(&self, i: u32) -> usize {
        let i = i as usize;
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    pub fn neighbors(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.neighbors[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn cooc_row(&self, i: u32) -> &[u32] {
        let i = i as usize;
        &self.cooc[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Co-occurrence count of edge `a`-`b`, `None` when not adjacent.
    pub fn edge_cooc(&self, a: u32, b: u32) -> Option<u32> {
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|k| self.cooc_row(a)[k])
    }

    pub fn component_of(&self, i: u32) -> u32 {
        self.component[i as usize]
    }

    pub fn same_component(&self, a: u32, b: u32) -> bool {
        self.component[a as usize] == self.component[b as usize]
    }

    /// Unordered item pairs joined by some path.
    pub fn connected_pairs(&self) -> u64 {
        self.component_sizes
            .iter()
            .map(|&s| s * s.saturating_sub(1) / 2)
            .sum()
    }

    pub fn total_pairs(&self) -> u64 {
        let n = self.n() as u64;
        n * n.saturating_sub(1) / 2
    }

    /// Each undirected edge once, as `(a, b, cooc)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        (0..self.n() as u32).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .zip(self.cooc_row(a))
                .filter(move |(&b, _)| b > a)
                .map(move |(&b, &c)| (a, b, c))
        })
    }

    pub(crate) fn raw_parts(&self) -> (&[u64], &[u32], &[u32]) {
        (&self.offsets, &self.neighbors, &self.cooc)
    }
}

/// Builds the global graph over the training vocabulary.
pub fn build_global_graph(train: &SequenceSet) -> GlobalGraph {
    build_global_graph_with_cap(train, DEFAULT_CLIQUE_CAP)
}

pub fn build_global_graph_with_cap(train: &SequenceSet, clique_cap: usize) -> GlobalGraph {
    GlobalGraph::from_item_lists(
        train.n_items(),
        train.sequences.iter().map(|s| s.items.as_slice()),
        clique_cap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges_by_id(set: &SequenceSet, g: &GlobalGraph) -> Vec<(String, String, u32)> {
        let mut out: Vec<_> = g
            .edges()
            .map(|(a, b, c)| {
                let (x, y) = (set.vocab.decode(a).unwrap(), set.vocab.decode(b).unwrap());
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                (x.to_string(), y.to_string(), c)
            })
            .collect();
        out.sort();
        out
    }

    #[test]
    fn toy_cliques() {
        let set = SequenceSet::from_id_lists(&[
            vec!["x1", "x2", "x3"],
            vec!["x3", "x5"],
            vec!["x2", "x4"],
            vec!["x4", "x6"],
        ]);
        let g = build_global_graph(&set);
        let e = |a: &str, b: &str| (a.to_string(), b.to_string(), 1);
        assert_eq!(
            edges_by_id(&set, &g),
            vec![
                e("x1", "x2"),
                e("x1", "x3"),
                e("x2", "x3"),
                e("x2", "x4"),
                e("x3", "x5"),
                e("x4", "x6")
            ]
        );
        assert_eq!(g.n_edges(), 6);
    }

    #[test]
    fn duplicates_collapse() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "a", "b"]]);
        let g = build_global_graph(&set);
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edge_cooc(0, 1), Some(1));
    }

    #[test]
    fn cooc_counts_sequences() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"], vec!["a", "b"]]);
        let g = build_global_graph(&set);
        assert_eq!(g.edge_cooc(0, 1), Some(2));
        assert_eq!(g.edge_cooc(1, 0), Some(2));
    }

    #[test]
    fn oversized_clique_still_built() {
        let items: Vec<u32> = (0..10).collect();
        let g = GlobalGraph::from_item_lists(10, [items.as_slice()], 3);
        assert_eq!(g.n_edges(), 45);
    }

    #[test]
    fn from_csr_validates() {
        let g = GlobalGraph::from_item_lists(3, [&[0u32, 1][..], &[1, 2][..]], 500);
        let (o, n, c) = g.raw_parts();
        let rebuilt = GlobalGraph::from_csr(o.to_vec(), n.to_vec(), c.to_vec()).unwrap();
        assert_eq!(rebuilt, g);
        // 0 -> 1 without 1 -> 0.
        assert!(GlobalGraph::from_csr(vec![0, 1, 1], vec![1], vec![1]).is_err());
        // self-loop
        assert!(GlobalGraph::from_csr(vec![0, 1], vec![0], vec![1]).is_err());
    }

    #[test]
    fn components() {
        let g = GlobalGraph::from_item_lists(5, [&[0u32, 1][..], &[2, 3][..]], 500);
        assert!(g.same_component(0, 1));
        assert!(!g.same_component(1, 2));
        assert!(!g.same_component(4, 0));
        assert_eq!(g.connected_pairs(), 2);
        assert_eq!(g.total_pairs(), 10);
    }
}

use super::{CrClass, GlobalGraph};
use crate::{Error, Result};

/// Reusable visited array for repeated breadth-first searches.
///
/// Each search bumps an epoch instead of clearing the array, so a sweep over
/// all sources allocates once.
#[derive(Debug, Clone)]
pub struct BfsScratch {
    stamp: Vec<u32>,
    depth: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl BfsScratch {
    pub fn new(n: usize) -> Self {
        BfsScratch {
            stamp: vec![0; n],
            depth: vec![0; n],
            epoch: 0,
            queue: Vec::with_capacity(n.min(1 << 16)),
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }

    /// Breadth-first search from `source` up to `max_depth` edges.
    ///
    /// `visit(node, depth)` is called once per reached node other than the
    /// source, in nondecreasing depth order; returning `true` stops the
    /// search early.
    pub fn run<F>(&mut self, g: &GlobalGraph, source: u32, max_depth: u32, mut visit: F)
    where
        F: FnMut(u32, u32) -> bool,
    {
        assert!(self.stamp.len() >= g.n(), "scratch smaller than graph");
        self.next_epoch();
        let epoch = self.epoch;
        self.queue.clear();
        self.stamp[source as usize] = epoch;
        self.depth[source as usize] = 0;
        self.queue.push(source);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            let d = self.depth[v as usize];
            if d >= max_depth {
                // Queue is depth-ordered: nothing further can be expanded.
                break;
            }
            for &w in g.neighbors(v) {
                let slot = w as usize;
                if self.stamp[slot] != epoch {
                    self.stamp[slot] = epoch;
                    self.depth[slot] = d + 1;
                    self.queue.push(w);
                    if visit(w, d + 1) {
                        return;
                    }
                }
            }
        }
    }

    /// Distance found by the last [`run`](Self::run), if `node` was reached.
    pub fn distance(&self, node: u32) -> Option<u32> {
        (self.stamp[node as usize] == self.epoch).then(|| self.depth[node as usize])
    }
}

/// Items at each shortest-path distance `1..=max_hop + 1` from `source`.
///
/// The returned vector has `max_hop + 1` entries; entry `d - 1` holds the
/// items exactly `d` edges away, in ascending index order.
pub fn bfs_frontiers(g: &GlobalGraph, source: u32, max_hop: usize) -> Vec<Vec<u32>> {
    assert!((source as usize) < g.n(), "source {source} out of range");
    let mut frontiers = vec![Vec::new(); max_hop + 1];
    let mut scratch = BfsScratch::new(g.n());
    scratch.run(g, source, max_hop as u32 + 1, |w, d| {
        frontiers[d as usize - 1].push(w);
        false
    });
    for f in &mut frontiers {
        f.sort_unstable();
    }
    frontiers
}

/// Relation between two distinct items with `max_hop` explicit hop classes.
pub fn cr_between(g: &GlobalGraph, a: u32, b: u32, max_hop: usize) -> Result<CrClass> {
    CrResolver::new(g, max_hop).classify(a, b)
}

/// Answers repeated relation queries against one graph.
#[derive(Debug, Clone)]
pub struct CrResolver<'g> {
    graph: &'g GlobalGraph,
    max_hop: usize,
    scratch: BfsScratch,
}

impl<'g> CrResolver<'g> {
    pub fn new(graph: &'g GlobalGraph, max_hop: usize) -> Self {
        assert!(max_hop >= 1, "max_hop must be at least 1");
        CrResolver {
            graph,
            max_hop,
            scratch: BfsScratch::new(graph.n()),
        }
    }

    pub fn graph(&self) -> &'g GlobalGraph {
        self.graph
    }

    pub fn max_hop(&self) -> usize {
        self.max_hop
    }

    fn check(&self, item: u32) -> Result<()> {
        if (item as usize) < self.graph.n() {
            Ok(())
        } else {
            Err(Error::ItemOutOfRange {
                index: item,
                n: self.graph.n(),
            })
        }
    }

    pub fn classify(&mut self, a: u32, b: u32) -> Result<CrClass> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Err(Error::SameItem(a));
        }
        if !self.graph.same_component(a, b) {
            return Ok(CrClass::Disconnected);
        }
        // Search from the lower-degree endpoint; the relation is symmetric.
        let (src, dst) = if self.graph.degree(a) <= self.graph.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        let mut found = None;
        self.scratch
            .run(self.graph, src, self.max_hop as u32, |w, d| {
                if w == dst {
                    found = Some(d);
                    true
                } else {
                    false
                }
            });
        Ok(match found {
            Some(d) => CrClass::from_distance(Some(d), self.max_hop),
            None => CrClass::Others,
        })
    }

    /// Relations between `source` and every item of `targets`, with a single
    /// search. Targets equal to `source` map to `self_class`.
    pub fn classify_from(
        &mut self,
        source: u32,
        targets: &[u32],
        self_class: CrClass,
    ) -> Result<Vec<CrClass>> {
        self.check(source)?;
        for &t in targets {
            self.check(t)?;
        }
        let mut remaining = targets
            .iter()
            .filter(|&&t| t != source && self.graph.same_component(source, t))
            .count();
        if remaining > 0 {
            let max_hop = self.max_hop as u32;
            let mut wanted: Vec<u32> = targets.to_vec();
            wanted.sort_unstable();
            self.scratch.run(self.graph, source, max_hop, |w, _| {
                if wanted.binary_search(&w).is_ok() {
                    remaining -= targets.iter().filter(|&&t| t == w).count();
                }
                remaining == 0
            });
        }
        Ok(targets
            .iter()
            .map(|&t| {
                if t == source {
                    self_class
                } else if !self.graph.same_component(source, t) {
                    CrClass::Disconnected
                } else {
                    match self.scratch.distance(t) {
                        Some(d) if d > 0 => CrClass::from_distance(Some(d), self.max_hop),
                        _ => CrClass::Others,
                    }
                }
            })
            .collect())
    }
}

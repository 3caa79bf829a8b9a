use std::fmt;

use serde::{Deserialize, Serialize};

/// Hop-level collaborative relation between two distinct items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CrClass {
    /// Shortest path of `h + 1` edges.
    Hop(u32),
    /// Connected, but at least `max_hop + 1` edges apart.
    Others,
    /// No path between the items.
    Disconnected,
}

impl CrClass {
    /// Class for a shortest-path length in edges (`None` = unreachable).
    pub fn from_distance(distance: Option<u32>, max_hop: usize) -> CrClass {
        match distance {
            None => CrClass::Disconnected,
            Some(0) => panic!("distance 0 is a self-pair"),
            Some(d) if (d as usize) <= max_hop => CrClass::Hop(d - 1),
            Some(_) => CrClass::Others,
        }
    }

    /// Stable machine key: `hop0`, `hop1`, ..., `others`, `none`.
    pub fn key(&self) -> String {
        match self {
            CrClass::Hop(h) => format!("hop{h}"),
            CrClass::Others => "others".into(),
            CrClass::Disconnected => "none".into(),
        }
    }

    /// Position in a [`ClassCounts`] layout for `max_hop` explicit hops.
    pub fn slot(&self, max_hop: usize) -> usize {
        match *self {
            CrClass::Hop(h) => {
                assert!((h as usize) < max_hop, "hop {h} beyond max_hop {max_hop}");
                h as usize
            }
            CrClass::Others => max_hop,
            CrClass::Disconnected => max_hop + 1,
        }
    }

    pub fn all(max_hop: usize) -> impl Iterator<Item = CrClass> {
        (0..max_hop as u32)
            .map(CrClass::Hop)
            .chain([CrClass::Others, CrClass::Disconnected])
    }
}

impl fmt::Display for CrClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrClass::Hop(h) => write!(f, "{h}-hop"),
            CrClass::Others => f.write_str("others"),
            CrClass::Disconnected => f.write_str("none"),
        }
    }
}

/// Observation counts per class for a fixed `max_hop`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassCounts {
    max_hop: usize,
    counts: Vec<u64>,
}

impl ClassCounts {
    pub fn new(max_hop: usize) -> Self {
        ClassCounts {
            max_hop,
            counts: vec![0; max_hop + 2],
        }
    }

    pub fn max_hop(&self) -> usize {
        self.max_hop
    }

    pub fn add(&mut self, class: CrClass, n: u64) {
        self.counts[class.slot(self.max_hop)] += n;
    }

    pub fn get(&self, class: CrClass) -> u64 {
        self.counts[class.slot(self.max_hop)]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn merge(mut self, other: &ClassCounts) -> Self {
        assert_eq!(self.max_hop, other.max_hop);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (CrClass, u64)> + '_ {
        CrClass::all(self.max_hop).zip(self.counts.iter().copied())
    }

    /// `{"hop0": c0, ..., "others": co, "none": cn}` in class order.
    pub fn to_json_counts(&self) -> serde_json::Map<String, serde_json::Value> {
        self.iter()
            .map(|(c, n)| (c.key(), serde_json::Value::from(n)))
            .collect()
    }

    /// Proportions over `denominator`; `null` values when it is zero.
    pub fn to_json_proportions(
        &self,
        denominator: u64,
        include: impl Fn(CrClass) -> bool,
    ) -> serde_json::Map<String, serde_json::Value> {
        self.iter()
            .filter(|(c, _)| include(*c))
            .map(|(c, n)| {
                let v = if denominator == 0 {
                    serde_json::Value::Null
                } else {
                    serde_json::Value::from(n as f64 / denominator as f64)
                };
                (c.key(), v)
            })
            .collect()
    }
}

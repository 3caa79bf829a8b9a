use serde_json::json;

use super::LabelCrRecord;
use crate::crgraph::CrClass;

/// Named group of sample ids (sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub name: String,
    pub sample_ids: Vec<u32>,
}

/// Ordered collection of named sample slices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlicePartition {
    pub kind: String,
    pub slices: Vec<Slice>,
}

impl SlicePartition {
    pub fn get(&self, name: &str) -> Option<&Slice> {
        self.slices.iter().find(|s| s.name == name)
    }

    pub fn is_disjoint(&self) -> bool {
        let mut all: Vec<u32> = self
            .slices
            .iter()
            .flat_map(|s| s.sample_ids.iter().copied())
            .collect();
        let len = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == len
    }

    pub fn covered(&self) -> usize {
        self.slices.iter().map(|s| s.sample_ids.len()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<String, serde_json::Value> = self
            .slices
            .iter()
            .map(|s| (s.name.clone(), s.sample_ids.len().into()))
            .collect();
        json!({
            "schema_version": 1,
            "kind": self.kind,
            "slices": counts,
        })
    }
}

/// Hop classes that get their own pure slice.
const PURE_HOPS: u32 = 3;

/// Samples whose label holds one single relation class with every prefix
/// item.
///
/// Uniform `Hop(0)`, `Hop(1)` and `Hop(2)` records land in `pure-0`,
/// `pure-1`, `pure-2`; uniform records of any other class share `others`.
/// Mixed records belong to no slice.
pub fn pure_partition(records: &[LabelCrRecord]) -> SlicePartition {
    let mut slices: Vec<Slice> = (0..PURE_HOPS)
        .map(|h| Slice {
            name: format!("pure-{h}"),
            sample_ids: Vec::new(),
        })
        .collect();
    slices.push(Slice {
        name: "others".into(),
        sample_ids: Vec::new(),
    });
    for r in records {
        let Some((&first, rest)) = r.crs.split_first() else {
            continue;
        };
        if rest.iter().any(|&c| c != first) {
            continue;
        }
        let slot = match first {
            CrClass::Hop(h) if h < PURE_HOPS => h as usize,
            _ => PURE_HOPS as usize,
        };
        slices[slot].sample_ids.push(r.sample_id);
    }
    for s in &mut slices {
        s.sample_ids.sort_unstable();
    }
    SlicePartition {
        kind: "pure".into(),
        slices,
    }
}

/// `direct`: the label is adjacent to at least one prefix item;
/// `indirect`: every other sample.
pub fn direct_indirect_partition(records: &[LabelCrRecord]) -> SlicePartition {
    let (mut direct, mut indirect) = (Vec::new(), Vec::new());
    for r in records {
        if r.crs.contains(&CrClass::Hop(0)) {
            direct.push(r.sample_id);
        } else {
            indirect.push(r.sample_id);
        }
    }
    direct.sort_unstable();
    indirect.sort_unstable();
    SlicePartition {
        kind: "direct-indirect".into(),
        slices: vec![
            Slice {
                name: "direct".into(),
                sample_ids: direct,
            },
            Slice {
                name: "indirect".into(),
                sample_ids: indirect,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CrClass::*;

    fn rec(id: u32, crs: &[CrClass]) -> LabelCrRecord {
        LabelCrRecord {
            sample_id: id,
            crs: crs.to_vec(),
        }
    }

    #[test]
    fn pure_slices() {
        let records = [
            rec(0, &[Hop(0), Hop(0)]),
            rec(1, &[Hop(1), Hop(0)]),
            rec(2, &[Hop(2)]),
            rec(3, &[Hop(3), Hop(3)]),
            rec(4, &[Disconnected]),
            rec(5, &[Others, Hop(3)]),
        ];
        let p = pure_partition(&records);
        assert_eq!(p.get("pure-0").unwrap().sample_ids, vec![0]);
        assert!(p.get("pure-1").unwrap().sample_ids.is_empty());
        assert_eq!(p.get("pure-2").unwrap().sample_ids, vec![2]);
        assert_eq!(p.get("others").unwrap().sample_ids, vec![3, 4]);
        assert!(p.is_disjoint());
        assert_eq!(p.to_json()["slices"]["others"], 2);
    }

    #[test]
    fn direct_and_indirect() {
        let records = [rec(0, &[Hop(1), Hop(0)]), rec(1, &[Hop(3)]), rec(2, &[Others])];
        let p = direct_indirect_partition(&records);
        assert_eq!(p.get("direct").unwrap().sample_ids, vec![0]);
        assert_eq!(p.get("indirect").unwrap().sample_ids, vec![1, 2]);
        assert_eq!(p.covered(), records.len());
        assert!(p.is_disjoint());
    }
}

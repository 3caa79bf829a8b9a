use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::analysis::PredictionSet;
use crate::ingest::Sample;

pub type ExactRatio = BigRational;

/// Hit counts by rank over a group of samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTally {
    pub k: usize,
    pub samples: u64,
    /// `hits_at_rank[r]` samples have their label at rank `r + 1`.
    pub hits_at_rank: Vec<u64>,
    /// Samples with no prediction list (scored as misses).
    pub missing: u64,
}

impl RankTally {
    pub fn new(k: usize) -> Self {
        RankTally {
            k,
            samples: 0,
            hits_at_rank: vec![0; k],
            missing: 0,
        }
    }

    pub fn hits(&self) -> u64 {
        self.hits_at_rank.iter().sum()
    }

    /// Fraction of samples whose label is in the top k; `None` when empty.
    pub fn precision(&self) -> Option<ExactRatio> {
        (self.samples > 0).then(|| {
            BigRational::new(BigInt::from(self.hits()), BigInt::from(self.samples))
        })
    }

    /// Mean reciprocal rank truncated at k; `None` when empty.
    pub fn mrr(&self) -> Option<ExactRatio> {
        (self.samples > 0).then(|| {
            let sum = self
                .hits_at_rank
                .iter()
                .enumerate()
                .fold(BigRational::zero(), |acc, (r, &h)| {
                    acc + BigRational::new(BigInt::from(h), BigInt::from(r + 1))
                });
            sum / BigRational::from_integer(BigInt::from(self.samples))
        })
    }

    pub fn merge(&mut self, other: &RankTally) {
        assert_eq!(self.k, other.k);
        self.samples += other.samples;
        self.missing += other.missing;
        for (a, b) in self.hits_at_rank.iter_mut().zip(&other.hits_at_rank) {
            *a += b;
        }
    }
}

pub(crate) fn to_f64(r: &ExactRatio) -> f64 {
    r.to_f64().expect("ratio of counts fits in f64")
}

/// Tallies label ranks within the first `k` entries of each list.
pub fn tally_ranks<'a, I>(preds: &PredictionSet, samples: I, k: usize) -> RankTally
where
    I: IntoIterator<Item = &'a Sample>,
{
    let mut t = RankTally::new(k);
    for s in samples {
        t.samples += 1;
        match preds.get(s.id) {
            None => t.missing += 1,
            Some(list) => {
                if let Some(r) = list.iter().take(k).position(|&i| i == s.label) {
                    t.hits_at_rank[r] += 1;
                }
            }
        }
    }
    t
}

pub fn precision_at_k<'a, I>(preds: &PredictionSet, samples: I, k: usize) -> Option<ExactRatio>
where
    I: IntoIterator<Item = &'a Sample>,
{
    tally_ranks(preds, samples, k).precision()
}

pub fn mrr_at_k<'a, I>(preds: &PredictionSet, samples: I, k: usize) -> Option<ExactRatio>
where
    I: IntoIterator<Item = &'a Sample>,
{
    tally_ranks(preds, samples, k).mrr()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(n: i64, d: i64) -> ExactRatio {
        BigRational::new(n.into(), d.into())
    }

    /// Samples with label 0 and prediction lists placing it at `ranks`
    /// (rank > list length means absent).
    fn fixture(ranks: &[usize], k: usize) -> (PredictionSet, Vec<Sample>) {
        let n = 50;
        let mut preds = PredictionSet::new(k);
        let mut samples = Vec::new();
        for (id, &rank) in ranks.iter().enumerate() {
            let mut list: Vec<u32> = (1..=k as u32).collect();
            if rank <= k {
                list[rank - 1] = 0;
            }
            preds.insert(id as u32, list, n).unwrap();
            samples.push(Sample {
                id: id as u32,
                prefix: vec![1],
                label: 0,
                origin_end_time: 0,
            });
        }
        (preds, samples)
    }

    #[test]
    fn precision_half() {
        let (p, s) = fixture(&[1, 11], 10);
        assert_eq!(precision_at_k(&p, &s, 10), Some(ratio(1, 2)));
    }

    #[test]
    fn all_first() {
        let (p, s) = fixture(&[1, 1, 1], 10);
        assert_eq!(precision_at_k(&p, &s, 10), Some(ratio(1, 1)));
        assert_eq!(mrr_at_k(&p, &s, 10), Some(ratio(1, 1)));
    }

    #[test]
    fn empty_group_is_undefined() {
        let (p, _) = fixture(&[1], 10);
        assert_eq!(precision_at_k(&p, &[], 10), None);
        assert_eq!(mrr_at_k(&p, &[], 10), None);
    }

    #[test]
    fn mrr_examples() {
        let (p, s) = fixture(&[1, 2], 10);
        assert_eq!(mrr_at_k(&p, &s, 10), Some(ratio(3, 4)));
        let (p, s) = fixture(&[11, 11], 10);
        assert_eq!(mrr_at_k(&p, &s, 10), Some(ratio(0, 1)));
    }

    #[test]
    fn missing_prediction_is_a_miss() {
        let (p, mut s) = fixture(&[1], 10);
        s.push(Sample {
            id: 9,
            prefix: vec![1],
            label: 0,
            origin_end_time: 0,
        });
        let t = tally_ranks(&p, &s, 10);
        assert_eq!(t.missing, 1);
        assert_eq!(t.precision(), Some(ratio(1, 2)));
    }

    #[test]
    fn smaller_k_truncates_lists() {
        let (p, s) = fixture(&[3], 10);
        assert_eq!(precision_at_k(&p, &s, 2), Some(ratio(0, 1)));
        assert_eq!(precision_at_k(&p, &s, 3), Some(ratio(1, 1)));
    }
}

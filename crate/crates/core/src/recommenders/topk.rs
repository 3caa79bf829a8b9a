use std::cmp::Ordering;

use rayon::prelude::*;

use super::Recommender;
use crate::analysis::PredictionSet;
use crate::ingest::SampleSet;
use crate::{Result, Scalar};

/// Ranked items with their scores, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList<T> {
    pub items: Vec<u32>,
    pub scores: Vec<T>,
}

/// Indices of the `k` largest scores, ordered by score descending and then
/// by index ascending.
pub fn top_k_indices<T: Scalar>(scores: &[T], k: usize) -> Vec<u32> {
    let k = k.min(scores.len());
    if k == 0 {
        return Vec::new();
    }
    let cmp = |a: &u32, b: &u32| -> Ordering {
        scores[*a as usize]
            .rank_cmp(scores[*b as usize])
            .then(a.cmp(b))
    };
    let mut idx: Vec<u32> = (0..scores.len() as u32).collect();
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// # Panics
///
/// Panics if `k` exceeds the number of items.
pub fn recommend_topk<T: Scalar, M: Recommender<T> + ?Sized>(
    model: &M,
    prefix: &[u32],
    k: usize,
) -> RecommendationList<T> {
    assert!(k <= model.n_items(), "k = {k} exceeds {} items", model.n_items());
    let scores = model.scores(prefix);
    let items = top_k_indices(&scores, k);
    RecommendationList {
        scores: items.iter().map(|&i| scores[i as usize]).collect(),
        items,
    }
}

/// Top-`k` lists for every sample, computed in parallel.
pub fn predict_all<T: Scalar, M: Recommender<T> + ?Sized>(
    model: &M,
    samples: &SampleSet,
    k: usize,
) -> Result<PredictionSet> {
    let n = model.n_items();
    let lists: Vec<(u32, Vec<u32>)> = samples
        .samples
        .par_iter()
        .map_init(
            || vec![T::zero(); n],
            |buf, s| {
                buf.fill(T::zero());
                model.score_into(&s.prefix, buf);
                (s.id, top_k_indices(buf, k))
            },
        )
        .collect();
    let mut preds = PredictionSet::new(k);
    for (id, list) in lists {
        preds.insert(id, list, n)?;
    }
    Ok(preds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_ties_fall_back_to_index() {
        assert_eq!(top_k_indices(&[0.0f64; 6], 3), vec![0, 1, 2]);
    }

    #[test]
    fn unique_max_is_first() {
        assert_eq!(top_k_indices(&[0.1f32, 0.5, 0.2, 0.5, 0.9], 3), vec![4, 1, 3]);
    }

    #[test]
    fn k_equal_to_n() {
        assert_eq!(top_k_indices(&[1.0f64, 3.0, 2.0], 3), vec![1, 2, 0]);
    }

    proptest! {
        #[test]
        fn output_is_true_top_k(scores in prop::collection::vec(0u8..6, 1..60), k in 1usize..20) {
            let scores: Vec<f64> = scores.into_iter().map(f64::from).collect();
            let top = top_k_indices(&scores, k);
            prop_assert_eq!(top.len(), k.min(scores.len()));
            let mut reference: Vec<u32> = (0..scores.len() as u32).collect();
            reference.sort_by(|&a, &b| scores[b as usize].partial_cmp(&scores[a as usize]).unwrap().then(a.cmp(&b)));
            reference.truncate(k);
            prop_assert_eq!(&top, &reference);
            let kth = scores[*top.last().unwrap() as usize];
            for i in 0..scores.len() as u32 {
                if !top.contains(&i) {
                    prop_assert!(scores[i as usize] <= kth);
                }
            }
        }
    }
}

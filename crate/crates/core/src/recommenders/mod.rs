//! Traditional baselines under the full-ranking protocol.
//!
//! Every model scores the whole catalogue for a prefix; [`recommend_topk`]
//! turns the score vector into a ranked list with ties broken by ascending
//! item index. Items already in the prefix are not excluded.

mod bpr;
mod item_knn;
mod sknn;
mod topk;

pub use bpr::{mean_bpr_loss, train_bpr_mf, BprConfig, BprMfModel, BprTraining};
pub use item_knn::{train_item_knn, ItemKnnModel, DEFAULT_ITEM_NEIGHBORS};
pub use sknn::{train_sknn, SknnConfig, SknnModel};
pub use topk::{predict_all, recommend_topk, top_k_indices, RecommendationList};

use crate::Scalar;

/// A model that scores every item given an ordered prefix.
pub trait Recommender<T: Scalar>: Sync {
    fn n_items(&self) -> usize;

    /// Writes one score per item into `scores` (length `n_items`).
    fn score_into(&self, prefix: &[u32], scores: &mut [T]);

    fn scores(&self, prefix: &[u32]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_items()];
        self.score_into(prefix, &mut out);
        out
    }
}

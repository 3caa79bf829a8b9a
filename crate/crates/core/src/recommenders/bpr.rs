use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Recommender;
use crate::ingest::SequenceSet;
use crate::io::*;
use crate::{Error, Result, Scalar};

const MAGIC: &[u8; 4] = b"BPR1";

/// Rejection-sampling attempts before a negative is given up on.
const NEGATIVE_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BprConfig {
    pub dim: usize,
    pub learning_rate: f64,
    pub l2: f64,
    pub epochs: usize,
    pub negatives: usize,
    pub init_std: f64,
}

impl Default for BprConfig {
    fn default() -> Self {
        BprConfig {
            dim: 128,
            learning_rate: 0.05,
            l2: 1e-5,
            epochs: 30,
            negatives: 1,
            init_std: 0.1,
        }
    }
}

impl BprConfig {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("bpr dim must be at least 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("bpr negatives must be at least 1".into()));
        }
        for (name, v) in [
            ("learning rate", self.learning_rate),
            ("l2", self.l2),
            ("init std", self.init_std),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Config(format!("bpr {name} must be finite and >= 0")));
            }
        }
        Ok(())
    }
}

/// Item factors only; a sequence is represented by the mean factor of its
/// items, so unseen test sequences need no fold-in training.
#[derive(Debug, Clone, PartialEq)]
pub struct BprMfModel<T> {
    n_items: usize,
    dim: usize,
    factors: Vec<T>,
}

impl<T: Scalar> BprMfModel<T> {
    fn init(n_items: usize, dim: usize, std: f64, rng: &mut ChaCha8Rng) -> Self {
        let normal = Normal::new(0.0, std).expect("validated std");
        let factors = (0..n_items * dim)
            .map(|_| T::from_f64_lossy(normal.sample(rng)))
            .collect();
        BprMfModel {
            n_items,
            dim,
            factors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor(&self, item: u32) -> &[T] {
        let at = item as usize * self.dim;
        &self.factors[at..at + self.dim]
    }

    pub fn factors(&self) -> &[T] {
        &self.factors
    }

    fn mean_factor(&self, items: impl Iterator<Item = u32>, out: &mut [T]) {
        out.fill(T::zero());
        let mut count = 0usize;
        for i in items {
            for (o, &f) in out.iter_mut().zip(self.factor(i)) {
                *o = *o + f;
            }
            count += 1;
        }
        if count > 0 {
            let inv = T::one() / T::from_usize(count).expect("count fits");
            out.iter_mut().for_each(|o| *o = *o * inv);
        }
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        write_u32(w, len_u32(self.n_items)?)?;
        write_u32(w, len_u32(self.dim)?)?;
        for &f in &self.factors {
            write_f64(w, f.to_f64_lossless())?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: &mut R) -> Result<Self> {
        expect_magic(r, MAGIC)?;
        let n_items = read_u32(r)? as usize;
        let dim = read_u32(r)? as usize;
        let factors = (0..n_items * dim)
            .map(|_| read_f64(r).map(T::from_f64_lossy))
            .collect::<Result<Vec<_>>>()?;
        Ok(BprMfModel {
            n_items,
            dim,
            factors,
        })
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Scalar> Recommender<T> for BprMfModel<T> {
    fn n_items(&self) -> usize {
        self.n_items
    }

    fn score_into(&self, prefix: &[u32], scores: &mut [T]) {
        let mut user = vec![T::zero(); self.dim];
        self.mean_factor(prefix.iter().copied(), &mut user);
        for (i, s) in scores.iter_mut().enumerate() {
            *s = dot(&user, self.factor(i as u32));
        }
    }
}

#[derive(Debug, Clone)]
pub struct BprTraining<T> {
    pub model: BprMfModel<T>,
    /// Mean BPR loss `-ln sigmoid(x_pos - x_neg)` per epoch.
    pub epoch_losses: Vec<f64>,
}

/// Training triples: every position of every sequence is a positive with
/// the rest of the sequence as context.
fn positions(train: &SequenceSet) -> Vec<(u32, u32)> {
    train
        .sequences
        .iter()
        .enumerate()
        .flat_map(|(s, seq)| (0..seq.items.len() as u32).map(move |p| (s as u32, p)))
        .collect()
}

fn sample_negative(rng: &mut ChaCha8Rng, n_items: usize, items: &[u32]) -> Option<u32> {
    (0..NEGATIVE_ATTEMPTS)
        .map(|_| rng.gen_range(0..n_items as u32))
        .find(|c| !items.contains(c))
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Pairwise-ranking SGD over (context, positive, negative) triples.
///
/// Single threaded and fully determined by `seed`.
pub fn train_bpr_mf<T: Scalar>(
    train: &SequenceSet,
    config: &BprConfig,
    seed: u64,
) -> Result<BprTraining<T>> {
    config.validate()?;
    let n = train.n_items();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = BprMfModel::<T>::init(n, config.dim, config.init_std, &mut rng);
    if n < 2 {
        return Ok(BprTraining {
            model,
            epoch_losses: Vec::new(),
        });
    }
    let lr = T::from_f64_lossy(config.learning_rate);
    let l2 = T::from_f64_lossy(config.l2);
    let d = config.dim;
    let mut order = positions(train);
    let mut ctx = vec![T::zero(); d];
    let mut diff = vec![T::zero(); d];
    let mut epoch_losses = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let (mut total, mut steps) = (0.0f64, 0u64);
        for &(s, p) in &order {
            let items = &train.sequences[s as usize].items;
            let pos = items[p as usize];
            let context = items
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != p as usize)
                .map(|(_, &i)| i);
            let context_len = items.len() - 1;
            if context_len == 0 {
                continue;
            }
            model.mean_factor(context.clone(), &mut ctx);
            for _ in 0..config.negatives {
                let Some(neg) = sample_negative(&mut rng, n, items) else {
                    continue;
                };
                for (k, dv) in diff.iter_mut().enumerate() {
                    *dv = model.factors[pos as usize * d + k] - model.factors[neg as usize * d + k];
                }
                let x = dot(&ctx, &diff).to_f64_lossless();
                let loss = softplus(-x);
                if !loss.is_finite() {
                    return Err(Error::Divergence(format!(
                        "non-finite loss in epoch {epoch} (score difference {x})"
                    )));
                }
                total += loss;
                steps += 1;
                // d(-loss)/dx = sigmoid(-x)
                let g = T::from_f64_lossy(1.0 / (1.0 + x.exp()));
                let ctx_scale = g / T::from_usize(context_len).expect("length fits");
                for (k, &cv) in ctx.iter().enumerate() {
                    let pi = pos as usize * d + k;
                    let ni = neg as usize * d + k;
                    model.factors[pi] = model.factors[pi] + lr * (g * cv - l2 * model.factors[pi]);
                    model.factors[ni] = model.factors[ni] + lr * (-(g * cv) - l2 * model.factors[ni]);
                }
                for c in context.clone() {
                    let row = &mut model.factors[c as usize * d..(c as usize + 1) * d];
                    for (f, &dv) in row.iter_mut().zip(&diff) {
                        *f = *f + lr * (ctx_scale * dv - l2 * *f);
                    }
                }
            }
        }
        let mean = if steps == 0 { 0.0 } else { total / steps as f64 };
        if !mean.is_finite() || model.factors.iter().any(|f| !f.is_finite()) {
            return Err(Error::Divergence(format!("non-finite factors after epoch {epoch}")));
        }
        log::info!("bpr epoch {} loss {mean:.6}", epoch + 1);
        epoch_losses.push(mean);
    }
    Ok(BprTraining {
        model,
        epoch_losses,
    })
}

/// Mean BPR loss over every training position with negatives drawn from
/// `seed`, without updating the model.
pub fn mean_bpr_loss<T: Scalar>(model: &BprMfModel<T>, train: &SequenceSet, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ctx = vec![T::zero(); model.dim];
    let (mut total, mut steps) = (0.0, 0u64);
    for (s, p) in positions(train) {
        let items = &train.sequences[s as usize].items;
        if items.len() < 2 {
            continue;
        }
        let Some(neg) = sample_negative(&mut rng, model.n_items, items) else {
            continue;
        };
        model.mean_factor(
            items
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != p as usize)
                .map(|(_, &i)| i),
            &mut ctx,
        );
        let pos = items[p as usize];
        let x = (dot(&ctx, model.factor(pos)) - dot(&ctx, model.factor(neg))).to_f64_lossless();
        total += softplus(-x);
        steps += 1;
    }
    if steps == 0 {
        0.0
    } else {
        total / steps as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(epochs: usize) -> BprConfig {
        BprConfig {
            dim: 8,
            epochs,
            ..BprConfig::default()
        }
    }

    #[test]
    fn learns_co_occurring_pair() {
        let mut lists: Vec<Vec<&str>> = vec![vec!["a", "b"]; 50];
        lists.push(vec!["c", "d"]);
        let set = SequenceSet::from_id_lists(&lists);
        let cfg = BprConfig {
            dim: 8,
            epochs: 20,
            ..BprConfig::default()
        };
        let t = train_bpr_mf::<f64>(&set, &cfg, 7).unwrap();
        let id = |s| set.vocab.encode(s).unwrap();
        let scores = t.model.scores(&[id("a")]);
        assert!(scores[id("b") as usize] > scores[id("c") as usize]);
        assert!(scores[id("b") as usize] > scores[id("d") as usize]);
    }

    #[test]
    fn zero_epochs_gives_finite_scores() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"], vec!["b", "c"]]);
        let t = train_bpr_mf::<f32>(&set, &small(0), 1).unwrap();
        assert!(t.epoch_losses.is_empty());
        assert!(t.model.scores(&[0, 1]).iter().all(|s| s.is_finite()));
    }

    #[test]
    fn seed_determinism() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b", "c"], vec!["b", "c"], vec!["c", "d"]]);
        let a = train_bpr_mf::<f32>(&set, &small(3), 42).unwrap();
        let b = train_bpr_mf::<f32>(&set, &small(3), 42).unwrap();
        let bits = |m: &BprMfModel<f32>| m.factors().iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.model), bits(&b.model));
        let c = train_bpr_mf::<f32>(&set, &small(3), 43).unwrap();
        assert_ne!(bits(&a.model), bits(&c.model));
    }

    #[test]
    fn first_epoch_lowers_loss() {
        let set = SequenceSet::from_id_lists(&[
            vec!["a", "b", "c"],
            vec!["a", "b"],
            vec!["d", "e"],
            vec!["d", "e", "f"],
            vec!["b", "c"],
        ]);
        let before = train_bpr_mf::<f64>(&set, &small(0), 3).unwrap();
        let after = train_bpr_mf::<f64>(&set, &small(1), 3).unwrap();
        let l0 = mean_bpr_loss(&before.model, &set, 99);
        let l1 = mean_bpr_loss(&after.model, &set, 99);
        assert!(l1 < l0, "{l1} !< {l0}");
    }

    #[test]
    fn huge_learning_rate_diverges() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"], vec!["b", "c"], vec!["c", "a"]]);
        let cfg = BprConfig {
            dim: 4,
            learning_rate: 1e200,
            init_std: 1.0,
            epochs: 5,
            ..BprConfig::default()
        };
        assert!(matches!(
            train_bpr_mf::<f64>(&set, &cfg, 0),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn rejects_bad_config() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"]]);
        let cfg = BprConfig {
            dim: 0,
            ..BprConfig::default()
        };
        assert!(matches!(train_bpr_mf::<f64>(&set, &cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn cache_round_trip() {
        let set = SequenceSet::from_id_lists(&[vec!["a", "b"], vec!["b", "c"]]);
        let t = train_bpr_mf::<f32>(&set, &small(1), 5).unwrap();
        let mut buf = Vec::new();
        t.model.write(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"BPR1");
        assert_eq!(BprMfModel::<f32>::read(&mut buf.as_slice()).unwrap(), t.model);
    }
}

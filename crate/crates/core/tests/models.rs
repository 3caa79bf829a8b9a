use crprobe::analysis::SlicePartition;
use crprobe::ingest::{Sample, SampleSet, SequenceSet};
use crprobe::recommenders::{
    predict_all, recommend_topk, train_bpr_mf, train_item_knn, train_sknn, BprConfig,
    Recommender, SknnConfig,
};
use crprobe::eval::{evaluate_slices, EvalOptions};
use proptest::prelude::*;

fn corpus() -> SequenceSet {
    SequenceSet::from_id_lists(&[
        vec!["a", "b", "c"],
        vec!["a", "b"],
        vec!["b", "c", "d"],
        vec!["d", "e"],
        vec!["a", "e"],
        vec!["c", "d"],
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// sim(i, j) * sqrt(freq(i) * freq(j)) recovers the co-occurrence count.
    #[test]
    fn item_knn_recovers_integer_counts(
        lists in prop::collection::vec(prop::collection::vec(0u32..12, 2..6), 1..25),
    ) {
        let named: Vec<Vec<String>> = lists
            .iter()
            .map(|l| l.iter().map(|i| format!("p{i}")).collect())
            .collect();
        let train = SequenceSet::from_id_lists(&named);
        let model = train_item_knn::<f64>(&train, usize::MAX);
        let freq: Vec<u64> = (0..train.n_items() as u32)
            .map(|i| train.sequences.iter().filter(|s| s.items.contains(&i)).count() as u64)
            .collect();
        for i in 0..train.n_items() as u32 {
            for j in 0..train.n_items() as u32 {
                if i == j { continue; }
                let together = train
                    .sequences
                    .iter()
                    .filter(|s| s.items.contains(&i) && s.items.contains(&j))
                    .count() as u64;
                match model.similarity(i, j) {
                    None => prop_assert_eq!(together, 0),
                    Some(s) => {
                        let back = s * ((freq[i as usize] * freq[j as usize]) as f64).sqrt();
                        prop_assert_eq!(back.round() as u64, together);
                        prop_assert!((back - together as f64).abs() < 1e-6);
                    }
                }
            }
        }
    }
}

#[test]
fn item_knn_ranks_by_last_item() {
    let train = corpus();
    let model = train_item_knn::<f64>(&train, 100);
    let b = train.vocab.encode("b").unwrap();
    let rec = recommend_topk(&model, &[b], 2);
    let names: Vec<&str> = rec.items.iter().map(|&i| train.vocab.decode(i).unwrap()).collect();
    assert_eq!(names, vec!["a", "c"]);
}

#[test]
fn sknn_scores_neighbouring_items() {
    let train = corpus();
    let model = train_sknn::<f64>(&train, SknnConfig::default()).unwrap();
    let a = train.vocab.encode("a").unwrap();
    let scores = model.scores(&[a]);
    assert_eq!(scores.len(), train.n_items());
    let b = train.vocab.encode("b").unwrap();
    let d = train.vocab.encode("d").unwrap();
    assert!(scores[b as usize] > scores[d as usize]);
}

#[test]
fn bpr_is_seed_deterministic_and_learns() {
    let train = corpus();
    let cfg = BprConfig { dim: 8, epochs: 40, ..Default::default() };
    let a = train_bpr_mf::<f32>(&train, &cfg, 7).unwrap();
    let b = train_bpr_mf::<f32>(&train, &cfg, 7).unwrap();
    assert_eq!(a.model.factors(), b.model.factors());
    let first = a.epoch_losses[0];
    let last = *a.epoch_losses.last().unwrap();
    assert!(last < first, "loss {first} -> {last}");
}

#[test]
fn predictions_evaluate_end_to_end() {
    let train = corpus();
    let model = train_item_knn::<f64>(&train, 100);
    let enc = |s: &str| train.vocab.encode(s).unwrap();
    let samples = SampleSet {
        samples: vec![
            Sample { id: 0, prefix: vec![enc("a")], label: enc("b"), origin_end_time: 0 },
            Sample { id: 1, prefix: vec![enc("d")], label: enc("a"), origin_end_time: 0 },
        ],
    };
    let preds = predict_all(&model, &samples, 2).unwrap();
    let r = evaluate_slices(&preds, &samples, &[&SlicePartition::default()], &EvalOptions { k: 2, ..Default::default() });
    assert_eq!(r.overall().samples, 2);
    assert_eq!(r.overall().hits, 1);
    assert_eq!(r.overall().prec_exact.as_deref(), Some("1/2"));
}

use std::collections::HashSet;

use crprobe::ingest::{
    build_sequences, dataset_stats, parse_events, preprocess, split_chronological, ColumnMapping,
    Event, Grouping, Sequence, SequenceSet, SplitRatios,
};
use proptest::prelude::*;

fn arb_events() -> impl Strategy<Value = Vec<Event>> {
    prop::collection::vec((0u8..12, 0u8..20, -200_000i64..400_000), 1..150).prop_map(|v| {
        v.into_iter()
            .map(|(s, i, t)| Event {
                session_id: format!("s{s}"),
                item_id: format!("p{i}"),
                timestamp: t,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sequences_are_time_ordered_and_complete(events in arb_events(), per_day in any::<bool>()) {
        let grouping = if per_day { Grouping::SessionPerDay } else { Grouping::Session };
        let set = build_sequences(&events, grouping).unwrap();
        prop_assert_eq!(set.n_interactions(), events.len() as u64);
        let times: std::collections::HashMap<(String, String), Vec<i64>> =
            events.iter().fold(Default::default(), |mut m, e| {
                m.entry((e.session_id.clone(), e.item_id.clone())).or_default().push(e.timestamp);
                m
            });
        prop_assert!(!times.is_empty());
        for s in &set.sequences {
            prop_assert!(!s.items.is_empty());
        }
        if !per_day {
            let sessions: HashSet<&str> = events.iter().map(|e| e.session_id.as_str()).collect();
            prop_assert_eq!(set.len(), sessions.len());
        }
    }

    #[test]
    fn preprocess_thresholds_hold(events in arb_events(), min_freq in 1u64..4, min_len in 2usize..4) {
        let raw = build_sequences(&events, Grouping::Session).unwrap();
        let Ok(clean) = preprocess(&raw, min_freq, min_len) else { return Ok(()); };
        let raw_counts: std::collections::HashMap<&str, u64> = raw
            .vocab
            .ids()
            .iter()
            .zip(&raw.counts)
            .map(|(id, &c)| (id.as_str(), c))
            .collect();
        for s in &clean.sequences {
            prop_assert!(s.items.len() >= min_len);
            for &i in &s.items {
                let id = clean.vocab.decode(i).unwrap();
                prop_assert!(raw_counts[id] >= min_freq);
            }
        }
        prop_assert!(clean.counts.iter().all(|&c| c > 0));
        prop_assert_eq!(clean.counts.len(), clean.n_items());
    }

    #[test]
    fn split_respects_time_and_vocabulary(
        lists in prop::collection::vec(prop::collection::vec(0u32..15, 2..6), 3..40),
        times in prop::collection::vec(0i64..50, 40),
    ) {
        let vocab_ids: Vec<String> = (0..15).map(|i| format!("p{i}")).collect();
        let vocab = crprobe::ingest::Vocab::from_ids(vocab_ids).unwrap();
        let seqs: Vec<Sequence> = lists
            .iter()
            .enumerate()
            .map(|(id, l)| Sequence { id: id as u32, items: l.clone(), end_time: times[id] })
            .collect();
        let data = SequenceSet::new(seqs, vocab).unwrap();
        let split = split_chronological(&data, SplitRatios::default()).unwrap();
        let last_train = split.train.sequences.iter().map(|s| s.end_time).max().unwrap();
        let n = split.train.n_items() as u32;
        for s in split.valid.iter().chain(split.test.iter()) {
            prop_assert!(s.origin_end_time >= last_train);
            prop_assert!(!s.prefix.is_empty());
            prop_assert!(s.label < n);
            prop_assert!(s.prefix.iter().all(|&i| i < n));
        }
        prop_assert!(split.train.counts.iter().all(|&c| c > 0));
        let max_valid = split.valid.iter().map(|s| s.origin_end_time).max();
        let min_test = split.test.iter().map(|s| s.origin_end_time).min();
        if let (Some(v), Some(t)) = (max_valid, min_test) {
            prop_assert!(v <= t);
        }
    }

    #[test]
    fn stats_ignore_sequence_order(
        lists in prop::collection::vec(prop::collection::vec(0u32..10, 1..6), 1..20),
        rot in 0usize..20,
    ) {
        let ids = |l: &Vec<u32>| l.iter().map(|i| format!("p{i}")).collect::<Vec<_>>();
        let a: Vec<Vec<String>> = lists.iter().map(ids).collect();
        let mut b = a.clone();
        let r = rot % b.len();
        b.rotate_left(r);
        let sa = dataset_stats(&SequenceSet::from_id_lists(&a));
        let sb = dataset_stats(&SequenceSet::from_id_lists(&b));
        prop_assert_eq!(sa, sb);
    }
}

#[test]
fn stats_hand_case() {
    let set = SequenceSet::from_id_lists(&[vec!["a", "b", "c"], vec!["b", "c"], vec!["a", "c", "d", "e"]]);
    let s = dataset_stats(&set);
    assert_eq!((s.n_items, s.n_interactions, s.n_sequences), (5, 9, 3));
    assert_eq!(s.avg_length_2dp(), "3.00");
    let set = SequenceSet::from_id_lists(&[vec!["a", "b"], vec!["a", "b", "c"], vec!["c", "d"]]);
    assert_eq!(dataset_stats(&set).avg_length_2dp(), "2.33");
}

#[test]
fn tsv_round_trip_through_preprocess() {
    let tsv = "sid\titem\tts\n1\ta\t10\n1\tb\t20\n2\ta\t5\n2\tc\t6\n3\tb\t1\nx\t\t9\n";
    let parsed = parse_events(tsv.as_bytes(), &ColumnMapping::by_name("sid", "item", "ts")).unwrap();
    assert_eq!(parsed.events.len(), 5);
    assert_eq!(parsed.errors.len(), 1);
    let raw = build_sequences(&parsed.events, Grouping::Session).unwrap();
    let clean = preprocess(&raw, 1, 2).unwrap();
    assert_eq!(clean.decoded(), vec![vec!["a", "b"], vec!["a", "c"]]);
}

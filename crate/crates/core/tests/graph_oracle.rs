//! Relation classes checked against an independent Floyd-Warshall oracle.

use crprobe::crgraph::{
    bfs_frontiers, build_global_graph, cooc_frequency_histogram, cr_between, pair_class_histogram,
    pair_class_histogram_by_frontiers, CrClass,
};
use crprobe::ingest::{Sequence, SequenceSet, Vocab};
use proptest::prelude::*;

const INF: u32 = u32::MAX / 4;

/// All-pairs distances by Floyd-Warshall over the clique union, built
/// straight from the sequences (no CSR involved).
fn floyd_warshall(n: usize, lists: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for l in lists {
        for &a in l {
            for &b in l {
                if a != b {
                    d[a as usize][b as usize] = 1;
                }
            }
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn oracle_class(dist: u32, max_hop: usize) -> CrClass {
    if dist >= INF {
        CrClass::Disconnected
    } else if dist as usize <= max_hop {
        CrClass::Hop(dist - 1)
    } else {
        CrClass::Others
    }
}

fn corpus(n: usize, lists: &[Vec<u32>]) -> SequenceSet {
    let vocab = Vocab::from_ids((0..n).map(|i| format!("i{i}"))).unwrap();
    let sequences = lists
        .iter()
        .enumerate()
        .map(|(i, l)| Sequence {
            id: i as u32,
            items: l.clone(),
            end_time: i as i64,
        })
        .collect();
    SequenceSet::new(sequences, vocab).unwrap()
}

fn arb_corpus() -> impl Strategy<Value = (usize, Vec<Vec<u32>>)> {
    (2usize..=50).prop_flat_map(|n| {
        let seq = prop::collection::vec(0..n as u32, 1..6);
        (Just(n), prop::collection::vec(seq, 0..=30))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cr_between_matches_oracle((n, lists) in arb_corpus()) {
        let set = corpus(n, &lists);
        let g = build_global_graph(&set);
        let d = floyd_warshall(n, &lists);
        for h in 1..=6 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if a == b { continue; }
                    let got = cr_between(&g, a, b, h).unwrap();
                    prop_assert_eq!(got, oracle_class(d[a as usize][b as usize], h));
                }
            }
        }
    }

    #[test]
    fn histogram_identities((n, lists) in arb_corpus(), h in 1usize..=6) {
        let set = corpus(n, &lists);
        let g = build_global_graph(&set);
        let hist = pair_class_histogram(&g, h);
        prop_assert_eq!(hist.counts.total(), (n * (n - 1) / 2) as u64);
        prop_assert_eq!(hist.get(CrClass::Hop(0)), g.n_edges());
        prop_assert_eq!(cooc_frequency_histogram(&g).total(), g.n_edges());
        prop_assert_eq!(&hist, &pair_class_histogram_by_frontiers(&g, h));

        let d = floyd_warshall(n, &lists);
        let mut oracle = crprobe::crgraph::ClassCounts::new(h);
        for a in 0..n {
            for b in a + 1..n {
                oracle.add(oracle_class(d[a][b], h), 1);
            }
        }
        prop_assert_eq!(&hist.counts, &oracle);
    }

    #[test]
    fn raising_max_hop_nests((n, lists) in arb_corpus()) {
        let g = build_global_graph(&corpus(n, &lists));
        let hists: Vec<_> = (1..=6).map(|h| pair_class_histogram(&g, h)).collect();
        for pair in hists.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            for h in 0..lo.max_hop() as u32 {
                prop_assert_eq!(lo.get(CrClass::Hop(h)), hi.get(CrClass::Hop(h)));
            }
            prop_assert!(hi.get(CrClass::Others) <= lo.get(CrClass::Others));
            prop_assert_eq!(lo.get(CrClass::Disconnected), hi.get(CrClass::Disconnected));
        }
    }

    #[test]
    fn symmetry_and_transitivity((n, lists) in arb_corpus()) {
        let g = build_global_graph(&corpus(n, &lists));
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if a == b { continue; }
                let ab = cr_between(&g, a, b, 4).unwrap();
                prop_assert_eq!(ab, cr_between(&g, b, a, 4).unwrap());
                if ab != CrClass::Hop(0) { continue; }
                for &c in g.neighbors(b) {
                    if c != a {
                        let ac = cr_between(&g, a, c, 4).unwrap();
                        prop_assert!(matches!(ac, CrClass::Hop(0) | CrClass::Hop(1)));
                    }
                }
            }
        }
    }

    #[test]
    fn frontiers_are_exact_distance_shells((n, lists) in arb_corpus(), src in 0usize..50) {
        let src = (src % n) as u32;
        let g = build_global_graph(&corpus(n, &lists));
        let d = floyd_warshall(n, &lists);
        let f = bfs_frontiers(&g, src, 3);
        prop_assert_eq!(f.len(), 4);
        for (depth, shell) in f.iter().enumerate() {
            let want: Vec<u32> = (0..n as u32)
                .filter(|&v| d[src as usize][v as usize] == depth as u32 + 1)
                .collect();
            prop_assert_eq!(shell, &want);
        }
    }

    #[test]
    fn graph_structure_invariants((n, lists) in arb_corpus()) {
        let g = build_global_graph(&corpus(n, &lists));
        for i in 0..n as u32 {
            let row = g.neighbors(i);
            prop_assert!(row.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(!row.contains(&i));
            for &j in row {
                let together = lists
                    .iter()
                    .filter(|l| l.contains(&i) && l.contains(&j))
                    .count() as u32;
                prop_assert_eq!(g.edge_cooc(i, j), Some(together));
                prop_assert_eq!(g.edge_cooc(j, i), Some(together));
            }
        }
    }
}

/// At least 200 corpora, every pair, every max_hop in 1..=6, zero mismatches.
#[test]
fn two_hundred_random_corpora_match_oracle() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0u64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=50);
        let n_seq = rng.gen_range(0..=30);
        let lists: Vec<Vec<u32>> = (0..n_seq)
            .map(|_| {
                let len = rng.gen_range(1..=6);
                (0..len).map(|_| rng.gen_range(0..n as u32)).collect()
            })
            .collect();
        let g = build_global_graph(&corpus(n, &lists));
        let d = floyd_warshall(n, &lists);
        for h in 1..=6 {
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    if a != b {
                        assert_eq!(
                            cr_between(&g, a, b, h).unwrap(),
                            oracle_class(d[a as usize][b as usize], h)
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}

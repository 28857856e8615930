//! The backtracking search must agree exactly with exhaustive injection
//! filtering on every small instance, and behave equivariantly under
//! relabeling of the data graph.

use exact_match::{brute_force_mappings, enumerate_mappings, MatchMode, MatchOptions};
use graph_core::{LabeledGraph, Mapping};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Instance {
    data: LabeledGraph,
    query: LabeledGraph,
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (2usize..=8, 1usize..=4, any::<bool>()).prop_flat_map(|(n, q, labeled)| {
        let pair_count = n * (n - 1) / 2;
        let edge_mask = proptest::collection::vec(any::<bool>(), pair_count);
        let labels = proptest::collection::vec(0u32..2, n);
        let query_nodes = proptest::collection::vec(0..n, q.min(n));
        (edge_mask, labels, query_nodes, Just((n, labeled))).prop_map(
            |(mask, labels, query_nodes, (n, labeled))| {
                let all_pairs: Vec<(usize, usize)> = (0..n)
                    .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
                    .collect();
                let edges: Vec<(usize, usize)> = all_pairs
                    .into_iter()
                    .zip(mask)
                    .filter(|(_, keep)| *keep)
                    .map(|(e, _)| e)
                    .collect();
                let data = if labeled {
                    LabeledGraph::with_labels(n, &edges, labels).unwrap()
                } else {
                    LabeledGraph::unlabeled(n, &edges).unwrap()
                };
                // Query as an induced subgraph of a (possibly different)
                // random node subset, deduplicated preserving order.
                let mut picked = Vec::new();
                for v in query_nodes {
                    if !picked.contains(&v) {
                        picked.push(v);
                    }
                }
                let query = data.induced_subgraph(&picked).unwrap();
                Instance { data, query }
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(220))]

    #[test]
    fn search_set_equals_brute_force(instance in arb_instance()) {
        let fast = enumerate_mappings(&instance.data, &instance.query, &MatchOptions::default())
            .unwrap();
        let slow = brute_force_mappings(&instance.data, &instance.query).unwrap();
        prop_assert_eq!(&fast.mappings, &slow);
        prop_assert_eq!(fast.found, !slow.is_empty());

        let exists = enumerate_mappings(
            &instance.data,
            &instance.query,
            &MatchOptions { mode: MatchMode::Exists, ..Default::default() },
        )
        .unwrap();
        prop_assert_eq!(exists.found, !slow.is_empty());

        if fast.found {
            let first = enumerate_mappings(
                &instance.data,
                &instance.query,
                &MatchOptions { mode: MatchMode::First, ..Default::default() },
            )
            .unwrap();
            prop_assert!(slow.contains(&first.mappings[0]));
        }
    }

    #[test]
    fn relabeling_data_nodes_permutes_assignments(
        instance in arb_instance(),
        seed in any::<u64>(),
    ) {
        let n = instance.data.num_nodes();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let permuted = instance.data.permuted(&perm).unwrap();

        let base = enumerate_mappings(&instance.data, &instance.query, &MatchOptions::default())
            .unwrap();
        let moved = enumerate_mappings(&permuted, &instance.query, &MatchOptions::default())
            .unwrap();

        let mut expected: Vec<Mapping> = base
            .mappings
            .iter()
            .map(|m| {
                Mapping::new(m.assignment().iter().map(|&v| perm[v]).collect()).unwrap()
            })
            .collect();
        expected.sort_unstable();
        prop_assert_eq!(moved.mappings, expected);
    }
}

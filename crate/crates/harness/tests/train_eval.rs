//! Trainer and evaluator behavior at small scale: structural contracts,
//! seeded determinism, single-pair overfit capacity, noise semantics and
//! the chance-rate sanity band for an untrained model.

use aednet::{init_params, Model, ModelConfig};
use graph_core::{LabeledGraph, MatchPair, NodeFeatures};
use harness::{bench_runtime, evaluate, train, BenchOptions, EvalOptions, TrainConfig};
use pairgen::{generate_pairs, generate_synthetic_corpus, GenConfig, SyntheticParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn labeled_pairs(num: usize, seed: u64) -> Vec<MatchPair> {
    let corpus = generate_synthetic_corpus(
        &SyntheticParams {
            num_graphs: 8,
            nodes_min: 8,
            nodes_max: 12,
            edge_prob: 0.35,
            label_count: 3,
        },
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
    .unwrap();
    generate_pairs(&GenConfig::new(3, 5, num, seed), &corpus)
        .unwrap()
        .pairs
}

#[test]
fn one_epoch_takes_one_step_per_pair_and_writes_a_checkpoint() {
    let pairs = labeled_pairs(1, 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = TrainConfig {
        epochs: 1,
        ..TrainConfig::new(dir.path(), 5)
    };
    let model_cfg = ModelConfig::new(2, 2, 8, 3);
    let result = train(&pairs, &pairs, &model_cfg, &cfg).unwrap();
    assert_eq!(result.log.len(), 1);
    assert!(result.best_checkpoint.exists());
    // One optimizer step per pair per epoch.
    assert_eq!(result.final_store.step(), 1);
}

#[test]
fn same_seed_reproduces_the_loss_log_exactly() {
    let pairs = labeled_pairs(6, 3);
    let model_cfg = ModelConfig::new(2, 2, 8, 3);
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::new(dir.path(), 11)
        };
        train(&pairs[..4], &pairs[4..], &model_cfg, &cfg).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.log_lines_stable(), b.log_lines_stable());
    assert_eq!(a.best_epoch, b.best_epoch);
}

#[test]
fn single_easy_pair_overfits_to_perfect_f1() {
    // A labeled path with a unique mapping; 500 single-pair epochs at a
    // fast learning rate must drive train F1 to 1.
    let data = LabeledGraph::with_labels(
        6,
        &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)],
        vec![0, 1, 2, 0, 1, 2],
    )
    .unwrap();
    let query = data.induced_subgraph(&[0, 1, 2]).unwrap();
    let mapping = graph_core::Mapping::new(vec![0, 1, 2]).unwrap();
    let pair = MatchPair::new(data, query, vec![mapping], false).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let cfg = TrainConfig {
        epochs: 500,
        lr: 0.01,
        ..TrainConfig::new(dir.path(), 7)
    };
    let model_cfg = ModelConfig::new(2, 2, 16, 3);
    let pairs = vec![pair];
    let result = train(&pairs, &pairs, &model_cfg, &cfg).unwrap();
    let model = Model::new(result.model_config.clone()).unwrap();
    let f1 = harness::mean_f1(&model, &result.final_store, &pairs, result.vocabulary.as_ref()).unwrap();
    assert_eq!(f1, 1.0, "overfit failed: final F1 {f1}");
}

#[test]
fn truncated_training_pairs_are_rejected() {
    let pairs = labeled_pairs(2, 9);
    let truncated = MatchPair::new(
        pairs[0].data_graph().clone(),
        pairs[0].query_graph().clone(),
        pairs[0].mappings().to_vec(),
        true,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cfg = TrainConfig::new(dir.path(), 1);
    let err = train(&[truncated], &pairs, &ModelConfig::new(2, 2, 8, 3), &cfg).unwrap_err();
    assert!(matches!(err, harness::HarnessError::TruncatedTrainingPair { index: 0 }));
}

fn numerical_pair(seed: u64) -> MatchPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 8;
    let values: Vec<f64> = (0..n * 2).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
    let data = LabeledGraph::new(
        n,
        vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (0, 7), (2, 5)],
        NodeFeatures::Numerical { dim: 2, values },
        None,
    )
    .unwrap();
    let query = data.induced_subgraph(&[2, 3, 4, 5]).unwrap();
    let mapping = graph_core::Mapping::new(vec![2, 3, 4, 5]).unwrap();
    MatchPair::new(data, query, vec![mapping], false).unwrap()
}

#[test]
fn zero_noise_is_a_bitwise_no_op_and_noise_needs_numerical_features() {
    let pair = numerical_pair(4);
    let cfg = ModelConfig::new(2, 2, 8, 2);
    let model = Model::new(cfg.clone()).unwrap();
    let store = init_params(&cfg, 3).unwrap();
    let pairs = vec![pair];

    let clean = evaluate(&pairs, &model, &store, None, &EvalOptions::default()).unwrap();
    let zero = evaluate(
        &pairs,
        &model,
        &store,
        None,
        &EvalOptions {
            noise_std: Some(0.0),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(clean.to_csv_stable(), zero.to_csv_stable());

    let noisy = evaluate(
        &pairs,
        &model,
        &store,
        None,
        &EvalOptions {
            noise_std: Some(0.25),
            noise_seed: 5,
            by_ratio: false,
        },
    )
    .unwrap();
    let again = evaluate(
        &pairs,
        &model,
        &store,
        None,
        &EvalOptions {
            noise_std: Some(0.25),
            noise_seed: 5,
            by_ratio: false,
        },
    )
    .unwrap();
    assert_eq!(noisy.to_csv_stable(), again.to_csv_stable());

    // Categorical features refuse nonzero noise.
    let labeled = labeled_pairs(1, 6);
    let cfg = ModelConfig::new(2, 2, 8, 3);
    let store = init_params(&cfg, 3).unwrap();
    let model = Model::new(cfg).unwrap();
    let vocab = graph_core::LabelVocabulary::from_labels(0..3);
    let err = evaluate(
        &labeled,
        &model,
        &store,
        Some(&vocab),
        &EvalOptions {
            noise_std: Some(0.1),
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, harness::HarnessError::NoiseRequiresNumerical));
}

#[test]
fn ratio_buckets_partition_the_pair_count() {
    let pairs = labeled_pairs(12, 8);
    let cfg = ModelConfig::new(2, 2, 8, 3);
    let model = Model::new(cfg.clone()).unwrap();
    let store = init_params(&cfg, 3).unwrap();
    let vocab = graph_core::LabelVocabulary::from_labels(0..3);
    let report = evaluate(
        &pairs,
        &model,
        &store,
        Some(&vocab),
        &EvalOptions {
            by_ratio: true,
            ..Default::default()
        },
    )
    .unwrap();
    let buckets = report.buckets.unwrap();
    assert_eq!(buckets.len(), 10);
    assert_eq!(buckets.iter().map(|b| b.count).sum::<usize>(), pairs.len());
}

#[test]
fn untrained_model_scores_near_the_chance_rate_on_unlabeled_pairs() {
    // Structure-only pairs: without training, top-1 extraction should sit
    // near the chance rate E[matched columns per row / |G|].
    let corpus = generate_synthetic_corpus(
        &SyntheticParams {
            num_graphs: 6,
            nodes_min: 10,
            nodes_max: 14,
            edge_prob: 0.3,
            label_count: 0,
        },
        &mut ChaCha8Rng::seed_from_u64(21),
    )
    .unwrap();
    let pairs = generate_pairs(&GenConfig::new(3, 4, 30, 21), &corpus).unwrap().pairs;

    let chance: f64 = pairs
        .iter()
        .map(|p| {
            let m = p.matrix();
            let per_row: f64 = (0..m.query_size())
                .map(|i| m.matched_columns(i).count() as f64 / m.data_size() as f64)
                .sum::<f64>()
                / m.query_size() as f64;
            per_row
        })
        .sum::<f64>()
        / pairs.len() as f64;

    let cfg = ModelConfig::new(2, 2, 8, 1);
    let model = Model::new(cfg.clone()).unwrap();
    let store = init_params(&cfg, 33).unwrap();
    let report = evaluate(&pairs, &model, &store, None, &EvalOptions::default()).unwrap();
    assert!(
        (report.mean_f1 - chance).abs() < 0.25,
        "untrained F1 {:.3} vs chance {:.3}",
        report.mean_f1,
        chance
    );
}

#[test]
fn bench_reports_rows_and_exact_first_beats_model_on_tiny_pairs() {
    let pairs = labeled_pairs(6, 10);
    let cfg = ModelConfig::new(3, 4, 32, 3);
    let model = Model::new(cfg.clone()).unwrap();
    let store = init_params(&cfg, 3).unwrap();
    let vocab = graph_core::LabelVocabulary::from_labels(0..3);
    let report = bench_runtime(
        &pairs,
        &BenchOptions {
            model: Some((&model, &store, Some(&vocab))),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(report.rows.len(), pairs.len());
    let first = report.aggregate.exact_first_median.unwrap();
    let model_t = report.aggregate.model_median.unwrap();
    assert!(
        first < model_t,
        "expected exact-first ({first:.2e}s) to beat the model ({model_t:.2e}s) on tiny graphs"
    );
}

use std::path::PathBuf;
use std::time::Instant;

use aednet::{
    extract_top1, init_params, save_model_checkpoint, Model, ModelConfig, PairInputs, Supervision,
};
use graph_core::{FeatureKind, LabelVocabulary, MatchPair};
use numerics::{bind_params, collect_gradients, AdamConfig, Graph, ParamStore};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{f1_score, fmt_f64, HarnessError, Result};

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
    pub checkpoint_dir: PathBuf,
    /// Ablation: drop the cross-information substitution.
    pub no_cross: bool,
    /// Ablation: zero the edge-deleting loss weight (the loss is still
    /// computed and logged, just unweighted).
    pub no_delete: bool,
    /// Gaussian noise added to numerical node features during training.
    pub train_noise_std: Option<f64>,
    /// Rescale each step's gradient to this global L2 norm when it is
    /// larger. The learnable softmax temperature scales some gradient
    /// paths by 1/tau as it sharpens; clipping keeps those spikes from
    /// destabilizing the other parameters.
    pub clip_grad_norm: Option<f64>,
}

impl TrainConfig {
    pub fn new(checkpoint_dir: impl Into<PathBuf>, seed: u64) -> Self {
        TrainConfig {
            epochs: 100,
            lr: 0.001,
            seed,
            checkpoint_dir: checkpoint_dir.into(),
            no_cross: false,
            no_delete: false,
            train_noise_std: None,
            clip_grad_norm: Some(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    /// Mean edge-deleting component (monitored even when unweighted).
    pub delete_loss: f64,
    /// Mean matching component.
    pub matching_loss: f64,
    pub val_f1: f64,
    pub wall_secs: f64,
}

#[derive(Debug)]
pub struct TrainResult {
    pub log: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_f1: f64,
    pub best_checkpoint: PathBuf,
    pub final_store: ParamStore,
    pub model_config: ModelConfig,
    pub vocabulary: Option<LabelVocabulary>,
    pub wall_secs: f64,
}

impl TrainResult {
    /// Line-delimited log: epoch, train loss, the two components, val F1
    /// and wall time, in a fixed column order.
    pub fn log_lines(&self) -> String {
        let mut out = String::from("epoch,train_loss,delete_loss,matching_loss,val_f1,wall_secs\n");
        for r in &self.log {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.epoch,
                fmt_f64(r.train_loss),
                fmt_f64(r.delete_loss),
                fmt_f64(r.matching_loss),
                fmt_f64(r.val_f1),
                fmt_f64(r.wall_secs),
            ));
        }
        out
    }

    /// Same log without the wall-time column, for run-to-run comparisons.
    pub fn log_lines_stable(&self) -> String {
        let mut out = String::from("epoch,train_loss,delete_loss,matching_loss,val_f1\n");
        for r in &self.log {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.epoch,
                fmt_f64(r.train_loss),
                fmt_f64(r.delete_loss),
                fmt_f64(r.matching_loss),
                fmt_f64(r.val_f1),
            ));
        }
        out
    }
}

fn wrap_pair_error(pair: usize, err: HarnessError) -> HarnessError {
    HarnessError::TrainStep {
        pair,
        source: Box::new(err),
    }
}

/// One optimizer step per pair per epoch, seeded shuffling, a checkpoint
/// per epoch, and best-checkpoint selection by validation F1.
pub fn train(
    train_pairs: &[MatchPair],
    val_pairs: &[MatchPair],
    model_cfg: &ModelConfig,
    cfg: &TrainConfig,
) -> Result<TrainResult> {
    if train_pairs.is_empty() {
        return Err(HarnessError::EmptySet("training"));
    }
    if val_pairs.is_empty() {
        return Err(HarnessError::EmptySet("validation"));
    }
    if cfg.epochs == 0 {
        return Err(HarnessError::InvalidConfig("epochs must be >= 1".into()));
    }
    if cfg.lr <= 0.0 {
        return Err(HarnessError::InvalidConfig(format!("lr must be > 0, got {}", cfg.lr)));
    }
    if let Some(i) = train_pairs.iter().position(MatchPair::is_truncated) {
        return Err(HarnessError::TruncatedTrainingPair { index: i });
    }

    let mut model_cfg = model_cfg.clone();
    model_cfg.no_cross |= cfg.no_cross;
    if cfg.no_delete {
        model_cfg.lambda1 = 0.0;
    }
    let model = Model::new(model_cfg.clone())?;

    let all_pairs: Vec<&MatchPair> = train_pairs.iter().chain(val_pairs).collect();
    let vocabulary = build_vocabulary_ref(&all_pairs);

    let train_cache: Vec<(PairInputs, Supervision)> = train_pairs
        .iter()
        .map(|p| {
            let inputs = PairInputs::new(
                p.data_graph(),
                p.query_graph(),
                vocabulary.as_ref(),
                model_cfg.input_dim,
            )?;
            Ok((inputs, Supervision::from_pair(p)))
        })
        .collect::<Result<_>>()?;
    let val_cache: Vec<(PairInputs, &MatchPair)> = val_pairs
        .iter()
        .map(|p| {
            Ok((
                PairInputs::new(
                    p.data_graph(),
                    p.query_graph(),
                    vocabulary.as_ref(),
                    model_cfg.input_dim,
                )?,
                p,
            ))
        })
        .collect::<Result<_>>()?;

    std::fs::create_dir_all(&cfg.checkpoint_dir).map_err(|e| HarnessError::Io {
        path: cfg.checkpoint_dir.clone(),
        source: e,
    })?;

    let mut store = init_params(&model_cfg, cfg.seed)?;
    let adam = AdamConfig::with_lr(cfg.lr);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let started = Instant::now();

    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(usize, f64, PathBuf)> = None;
    let mut order: Vec<usize> = (0..train_pairs.len()).collect();

    for epoch in 1..=cfg.epochs {
        let epoch_start = Instant::now();
        order.shuffle(&mut shuffle_rng);

        let mut sum_total = 0.0;
        let mut sum_delete = 0.0;
        let mut sum_matching = 0.0;
        for &idx in &order {
            let (inputs, sup) = &train_cache[idx];
            let noisy;
            let inputs = match cfg.train_noise_std {
                Some(std) if std > 0.0 => {
                    noisy = perturb_features(inputs, std, &mut noise_rng);
                    &noisy
                }
                _ => inputs,
            };
            let mut graph = Graph::new();
            let binding = bind_params(&mut graph, &store).map_err(HarnessError::from)?;
            let (_, losses) = model
                .training_loss(&mut graph, &binding, inputs, sup)
                .map_err(|e| wrap_pair_error(idx, e.into()))?;
            graph
                .backward(losses.total)
                .map_err(|e| wrap_pair_error(idx, e.into()))?;

            sum_total += graph.value(losses.total).item();
            sum_delete += mean_value(&graph, &losses.delete);
            sum_matching += mean_value(&graph, &losses.matching);

            let mut grads = collect_gradients(&graph, &binding);
            if let Some(max_norm) = cfg.clip_grad_norm {
                clip_global_norm(&mut grads, max_norm);
            }
            store
                .adam_step(&grads, &adam)
                .map_err(|e| wrap_pair_error(idx, e.into()))?;
        }

        let val_f1 = mean_val_f1(&model, &store, &val_cache)?;
        let ckpt = cfg.checkpoint_dir.join(format!("epoch_{epoch:04}.ckpt"));
        save_model_checkpoint(&ckpt, &store, &model_cfg, vocabulary.as_ref())?;
        let improved = best.as_ref().map_or(true, |&(_, f1, _)| val_f1 > f1);
        if improved {
            best = Some((epoch, val_f1, ckpt.clone()));
        }

        let n = train_pairs.len() as f64;
        log.push(EpochRecord {
            epoch,
            train_loss: sum_total / n,
            delete_loss: sum_delete / n,
            matching_loss: sum_matching / n,
            val_f1,
            wall_secs: epoch_start.elapsed().as_secs_f64(),
        });
        log::info!(
            "epoch {epoch}: train loss {:.4}, val F1 {:.4}",
            sum_total / n,
            val_f1
        );
    }

    let (best_epoch, best_val_f1, best_checkpoint) = best.expect("at least one epoch ran");
    Ok(TrainResult {
        log,
        best_epoch,
        best_val_f1,
        best_checkpoint,
        final_store: store,
        model_config: model_cfg,
        vocabulary,
        wall_secs: started.elapsed().as_secs_f64(),
    })
}

fn build_vocabulary_ref(pairs: &[&MatchPair]) -> Option<LabelVocabulary> {
    let categorical = pairs
        .first()
        .map(|p| p.data_graph().feature_kind() == FeatureKind::Categorical)
        .unwrap_or(false);
    if !categorical {
        return None;
    }
    Some(LabelVocabulary::from_graphs(
        pairs.iter().flat_map(|p| [p.data_graph(), p.query_graph()]),
    ))
}

fn clip_global_norm(grads: &mut numerics::Gradients, max_norm: f64) {
    let norm = grads
        .values()
        .flat_map(|g| g.data())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let scale = max_norm / norm;
        for g in grads.values_mut() {
            for x in g.data_mut() {
                *x *= scale;
            }
        }
    }
}

fn mean_value(graph: &Graph, vars: &[numerics::VarId]) -> f64 {
    vars.iter().map(|&v| graph.value(v).item()).sum::<f64>() / vars.len() as f64
}

pub(crate) fn perturb_features(
    inputs: &PairInputs,
    std: f64,
    rng: &mut impl rand::Rng,
) -> PairInputs {
    use rand_distr::StandardNormal;
    let noisy = |t: &numerics::Tensor, rng: &mut dyn rand::RngCore| {
        let data: Vec<f64> = t
            .data()
            .iter()
            .map(|&x| {
                let z: f64 = rand::Rng::sample(rng, StandardNormal);
                x + std * z
            })
            .collect();
        numerics::Tensor::new(t.rows(), t.cols(), data)
    };
    let q = noisy(&inputs.query_features, rng);
    let d = noisy(&inputs.data_features, rng);
    inputs.clone().with_features(q, d)
}

fn mean_val_f1(
    model: &Model,
    store: &ParamStore,
    val_cache: &[(PairInputs, &MatchPair)],
) -> Result<f64> {
    let mut sum = 0.0;
    for (inputs, pair) in val_cache {
        let matrix = model.predict(store, inputs)?;
        let prediction = extract_top1(&matrix);
        sum += f1_score(&prediction, pair.matrix())?.f1;
    }
    Ok(sum / val_cache.len() as f64)
}

/// Evaluate a pair set with a (model, params) snapshot and return mean F1.
pub fn mean_f1(
    model: &Model,
    store: &ParamStore,
    pairs: &[MatchPair],
    vocabulary: Option<&LabelVocabulary>,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(HarnessError::EmptySet("evaluation"));
    }
    let mut sum = 0.0;
    for pair in pairs {
        let inputs = PairInputs::new(
            pair.data_graph(),
            pair.query_graph(),
            vocabulary,
            model.config().input_dim,
        )?;
        let matrix = model.predict(store, &inputs)?;
        sum += f1_score(&extract_top1(&matrix), pair.matrix())?.f1;
    }
    Ok(sum / pairs.len() as f64)
}

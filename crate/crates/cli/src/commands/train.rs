use std::path::PathBuf;

use clap::Args;

use aednet::{ModelConfig, Pooling};
use graph_core::MatchPair;
use harness::{train, TrainConfig};

use super::{emit_summary, ensure_out_dir, load_pairs, path_from_config, write_manifest, write_text};
use crate::config_file::{resolve, resolve_opt, ConfigFile};
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct TrainArgs {
    /// Directory holding train.pairs and val.pairs (from `gen`)
    #[arg(long)]
    pub(crate) data: Option<PathBuf>,

    #[arg(long)]
    epochs: Option<usize>,

    #[arg(long)]
    lr: Option<f64>,

    /// Number of layers (>= 2)
    #[arg(long)]
    layers: Option<usize>,

    /// Attention heads per layer (must divide --dim)
    #[arg(long)]
    heads: Option<usize>,

    /// Hidden embedding width
    #[arg(long)]
    dim: Option<usize>,

    /// Edge-deleting loss weight
    #[arg(long)]
    lambda1: Option<f64>,

    /// Interior-layer loss weight
    #[arg(long)]
    lambda2: Option<f64>,

    /// mean | sum | max
    #[arg(long)]
    pooling: Option<String>,

    /// Ablation: disable the cross-information substitution
    #[arg(long)]
    no_cross: bool,

    /// Ablation: zero the edge-deleting loss weight (still logged)
    #[arg(long)]
    no_delete: bool,

    /// Share one softmax temperature across all propagation sites
    #[arg(long)]
    shared_tau: bool,

    /// Gaussian feature noise during training (numerical features only)
    #[arg(long)]
    train_noise_std: Option<f64>,
}

pub(crate) struct ResolvedTrain {
    pub data: PathBuf,
    pub epochs: usize,
    pub lr: f64,
    pub layers: usize,
    pub heads: usize,
    pub dim: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub pooling: Pooling,
    pub shared_tau: bool,
    pub train_noise_std: Option<f64>,
}

pub(crate) fn resolve_train(
    file: &ConfigFile,
    section: &str,
    data: Option<PathBuf>,
    args: &TrainArgs,
) -> Result<ResolvedTrain, CliError> {
    let data = data
        .or(path_from_config(file, section, "data")?)
        .ok_or_else(|| CliError::usage("--data <dir> is required"))?;
    let pooling_raw = resolve(args.pooling.clone(), file.get(section, "pooling"), "mean".to_string())?;
    let pooling: Pooling = pooling_raw.parse().map_err(CliError::Usage)?;
    Ok(ResolvedTrain {
        data,
        epochs: resolve(args.epochs, file.get(section, "epochs"), 100)?,
        lr: resolve(args.lr, file.get(section, "lr"), 0.001)?,
        layers: resolve(args.layers, file.get(section, "layers"), 3)?,
        heads: resolve(args.heads, file.get(section, "heads"), 4)?,
        dim: resolve(args.dim, file.get(section, "dim"), 32)?,
        lambda1: resolve(args.lambda1, file.get(section, "lambda1"), 0.5)?,
        lambda2: resolve(args.lambda2, file.get(section, "lambda2"), 0.2)?,
        pooling,
        shared_tau: args.shared_tau,
        train_noise_std: resolve_opt(args.train_noise_std, file.get(section, "train_noise_std"))?,
    })
}

pub(crate) fn model_config_for(resolved: &ResolvedTrain, input_dim: usize) -> ModelConfig {
    let mut cfg = ModelConfig::new(resolved.layers, resolved.heads, resolved.dim, input_dim);
    cfg.lambda1 = resolved.lambda1;
    cfg.lambda2 = resolved.lambda2;
    cfg.pooling = resolved.pooling;
    cfg.shared_temperature = resolved.shared_tau;
    cfg
}

/// Split off truncated pairs (their mapping sets are incomplete, which
/// would mislabel matched columns in the loss).
pub(crate) fn drop_truncated(pairs: Vec<MatchPair>) -> (Vec<MatchPair>, usize) {
    let before = pairs.len();
    let kept: Vec<MatchPair> = pairs.into_iter().filter(|p| !p.is_truncated()).collect();
    let dropped = before - kept.len();
    if dropped > 0 {
        log::warn!("dropped {dropped} truncated pairs from the training set");
    }
    (kept, dropped)
}

pub(crate) fn effective_json(r: &ResolvedTrain, extra: serde_json::Value) -> serde_json::Value {
    let mut base = serde_json::json!({
        "data": r.data.display().to_string(),
        "epochs": r.epochs,
        "lr": r.lr,
        "layers": r.layers,
        "heads": r.heads,
        "dim": r.dim,
        "lambda1": r.lambda1,
        "lambda2": r.lambda2,
        "pooling": format!("{:?}", r.pooling).to_lowercase(),
        "shared_tau": r.shared_tau,
        "train_noise_std": r.train_noise_std,
    });
    if let (Some(obj), Some(add)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in add {
            obj.insert(k.clone(), v.clone());
        }
    }
    base
}

pub fn run(globals: &Globals, file: &ConfigFile, args: TrainArgs) -> Result<(), CliError> {
    let resolved = resolve_train(file, "train", args.data.clone(), &args)?;
    let train_raw = load_pairs(&resolved.data.join("train.pairs"))?;
    let val_pairs = load_pairs(&resolved.data.join("val.pairs"))?;
    let (train_pairs, dropped) = drop_truncated(train_raw);
    if train_pairs.is_empty() {
        return Err(CliError::Data("no untruncated training pairs left".into()));
    }

    let all: Vec<MatchPair> = train_pairs.iter().chain(&val_pairs).cloned().collect();
    let (_, input_dim) = super::derive_encoding(&all);
    let model_cfg = model_config_for(&resolved, input_dim);
    model_cfg.validate().map_err(CliError::from)?;

    ensure_out_dir(&globals.out)?;
    let cfg = TrainConfig {
        epochs: resolved.epochs,
        lr: resolved.lr,
        no_cross: args.no_cross,
        no_delete: args.no_delete,
        train_noise_std: resolved.train_noise_std,
        ..TrainConfig::new(globals.out.join("checkpoints"), globals.seed)
    };
    let result = train(&train_pairs, &val_pairs, &model_cfg, &cfg)?;
    write_text(&globals.out.join("log.csv"), &result.log_lines())?;

    write_manifest(
        globals,
        "train",
        effective_json(
            &resolved,
            serde_json::json!({
                "no_cross": args.no_cross,
                "no_delete": args.no_delete,
                "input_dim": input_dim,
                "dropped_truncated": dropped,
            }),
        ),
    )?;

    let human = vec![
        format!("trained {} epochs on {} pairs", resolved.epochs, train_pairs.len()),
        format!(
            "best val F1 {:.4} at epoch {} ({})",
            result.best_val_f1,
            result.best_epoch,
            result.best_checkpoint.display()
        ),
    ];
    emit_summary(
        globals,
        &human,
        serde_json::json!({
            "command": "train",
            "epochs": resolved.epochs,
            "train_pairs": train_pairs.len(),
            "val_pairs": val_pairs.len(),
            "best_epoch": result.best_epoch,
            "best_val_f1": result.best_val_f1,
            "best_checkpoint": result.best_checkpoint.display().to_string(),
            "wall_secs": result.wall_secs,
            "out": globals.out.display().to_string(),
        }),
    );
    Ok(())
}

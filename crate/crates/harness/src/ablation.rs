use aednet::{load_model_checkpoint, Model, ModelConfig};
use graph_core::MatchPair;

use crate::{evaluate, fmt_f64, train, EvalOptions, Result, TrainConfig, TrainResult};

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub variant: String,
    pub best_epoch: usize,
    pub best_val_f1: f64,
    pub test_f1: f64,
    pub train_wall_secs: f64,
}

#[derive(Debug)]
pub struct AblationReport {
    /// Full model, then no-cross, then no-delete.
    pub rows: Vec<AblationRow>,
    pub runs: Vec<TrainResult>,
}

impl AblationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,best_epoch,best_val_f1,test_f1,train_wall_secs\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.variant,
                r.best_epoch,
                fmt_f64(r.best_val_f1),
                fmt_f64(r.test_f1),
                fmt_f64(r.train_wall_secs),
            ));
        }
        out
    }

    pub fn to_csv_stable(&self) -> String {
        let mut out = String::from("variant,best_epoch,best_val_f1,test_f1\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.variant,
                r.best_epoch,
                fmt_f64(r.best_val_f1),
                fmt_f64(r.test_f1),
            ));
        }
        out
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "variants": self.rows.iter().map(|r| {
                serde_json::json!({
                    "variant": r.variant,
                    "best_epoch": r.best_epoch,
                    "best_val_f1": r.best_val_f1,
                    "test_f1": r.test_f1,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Train and evaluate the full model and the two single-mechanism
/// ablations (no cross-propagation; zero edge-deleting weight) under
/// identical seeds and data, reporting test F1 from each run's best
/// validation checkpoint.
pub fn run_ablation(
    train_pairs: &[MatchPair],
    val_pairs: &[MatchPair],
    test_pairs: &[MatchPair],
    model_cfg: &ModelConfig,
    base: &TrainConfig,
) -> Result<AblationReport> {
    let variants: [(&str, bool, bool); 3] = [
        ("full", false, false),
        ("no_cross", true, false),
        ("no_delete", false, true),
    ];
    let mut rows = Vec::with_capacity(3);
    let mut runs = Vec::with_capacity(3);
    for (name, no_cross, no_delete) in variants {
        let cfg = TrainConfig {
            checkpoint_dir: base.checkpoint_dir.join(name),
            no_cross,
            no_delete,
            ..base.clone()
        };
        let result = train(train_pairs, val_pairs, model_cfg, &cfg)?;

        // Judge on the best-validation checkpoint, not the final params.
        let (store, best_cfg, vocab) = load_model_checkpoint(&result.best_checkpoint)?;
        let model = Model::new(best_cfg)?;
        let report = evaluate(test_pairs, &model, &store, vocab.as_ref(), &EvalOptions::default())?;

        rows.push(AblationRow {
            variant: name.to_string(),
            best_epoch: result.best_epoch,
            best_val_f1: result.best_val_f1,
            test_f1: report.mean_f1,
            train_wall_secs: result.wall_secs,
        });
        runs.push(result);
    }
    Ok(AblationReport { rows, runs })
}

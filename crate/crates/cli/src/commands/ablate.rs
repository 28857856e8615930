use std::path::PathBuf;

use clap::Args;

use graph_core::MatchPair;
use harness::{run_ablation, TrainConfig};

use super::train::{drop_truncated, effective_json, model_config_for, resolve_train, TrainArgs};
use super::{emit_summary, ensure_out_dir, load_pairs, write_manifest, write_text};
use crate::config_file::ConfigFile;
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct AblateArgs {
    /// Training flags; --data must hold train.pairs, val.pairs and
    /// test.pairs.
    #[command(flatten)]
    train: TrainArgs,
}

pub fn run(globals: &Globals, file: &ConfigFile, args: AblateArgs) -> Result<(), CliError> {
    let resolved = resolve_train(file, "ablate", args.train.data.clone(), &args.train)?;
    let train_raw = load_pairs(&resolved.data.join("train.pairs"))?;
    let val_pairs = load_pairs(&resolved.data.join("val.pairs"))?;
    let test_pairs = load_pairs(&resolved.data.join("test.pairs"))?;
    let (train_pairs, dropped) = drop_truncated(train_raw);
    if train_pairs.is_empty() {
        return Err(CliError::Data("no untruncated training pairs left".into()));
    }

    let all: Vec<MatchPair> = train_pairs
        .iter()
        .chain(&val_pairs)
        .chain(&test_pairs)
        .cloned()
        .collect();
    let (_, input_dim) = super::derive_encoding(&all);
    let model_cfg = model_config_for(&resolved, input_dim);
    model_cfg.validate().map_err(CliError::from)?;

    ensure_out_dir(&globals.out)?;
    let base = TrainConfig {
        epochs: resolved.epochs,
        lr: resolved.lr,
        seed: globals.seed,
        checkpoint_dir: globals.out.join("checkpoints"),
        no_cross: false,
        no_delete: false,
        train_noise_std: resolved.train_noise_std,
    };
    let report = run_ablation(&train_pairs, &val_pairs, &test_pairs, &model_cfg, &base)?;
    write_text(&globals.out.join("ablation.csv"), &report.to_csv())?;
    for (row, run) in report.rows.iter().zip(&report.runs) {
        write_text(
            &globals.out.join(format!("log_{}.csv", row.variant)),
            &run.log_lines(),
        )?;
    }

    write_manifest(
        globals,
        "ablate",
        effective_json(
            &resolved,
            serde_json::json!({
                "input_dim": input_dim,
                "dropped_truncated": dropped,
            }),
        ),
    )?;

    let human: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{}: test F1 {:.4} (best epoch {})", r.variant, r.test_f1, r.best_epoch))
        .collect();
    let mut summary = report.summary();
    if let Some(obj) = summary.as_object_mut() {
        obj.insert("command".into(), "ablate".into());
        obj.insert("out".into(), globals.out.display().to_string().into());
    }
    emit_summary(globals, &human, summary);
    Ok(())
}

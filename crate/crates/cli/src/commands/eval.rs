use std::path::PathBuf;

use clap::Args;

use aednet::{load_model_checkpoint, Model};
use harness::{evaluate, EvalOptions};

use super::{emit_summary, ensure_out_dir, load_pairs, mix_seed, path_from_config, write_manifest, write_text};
use crate::config_file::{resolve_opt, ConfigFile};
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct EvalArgs {
    /// Pair file to evaluate; alternatively --data <dir> for its test.pairs
    #[arg(long)]
    pairs: Option<PathBuf>,

    /// Directory from `gen`; evaluates its test.pairs
    #[arg(long)]
    data: Option<PathBuf>,

    /// Checkpoint to evaluate
    #[arg(long)]
    ckpt: Option<PathBuf>,

    /// Zero-mean Gaussian noise on node features (numerical features only)
    #[arg(long)]
    noise_std: Option<f64>,

    /// Bucket per-pair F1 by |Q|/|G| in steps of 0.1
    #[arg(long)]
    by_ratio: bool,
}

pub fn run(globals: &Globals, file: &ConfigFile, args: EvalArgs) -> Result<(), CliError> {
    let pairs_path = match (args.pairs, args.data) {
        (Some(p), _) => p,
        (None, Some(dir)) => dir.join("test.pairs"),
        (None, None) => match path_from_config(file, "eval", "pairs")? {
            Some(p) => p,
            None => return Err(CliError::usage("--pairs <file> or --data <dir> is required")),
        },
    };
    let ckpt = args
        .ckpt
        .or(path_from_config(file, "eval", "ckpt")?)
        .ok_or_else(|| CliError::usage("--ckpt <file> is required"))?;
    let noise_std = resolve_opt(args.noise_std, file.get("eval", "noise_std"))?;

    let pairs = load_pairs(&pairs_path)?;
    let (store, model_cfg, vocabulary) = load_model_checkpoint(&ckpt)?;
    let model = Model::new(model_cfg)?;

    let options = EvalOptions {
        noise_std,
        noise_seed: mix_seed(globals.seed, 11),
        by_ratio: args.by_ratio,
    };
    let report = evaluate(&pairs, &model, &store, vocabulary.as_ref(), &options)?;

    ensure_out_dir(&globals.out)?;
    write_text(&globals.out.join("report.csv"), &report.to_csv())?;
    if let Some(buckets) = report.buckets_csv() {
        write_text(&globals.out.join("buckets.csv"), &buckets)?;
    }

    write_manifest(
        globals,
        "eval",
        serde_json::json!({
            "pairs": pairs_path.display().to_string(),
            "ckpt": ckpt.display().to_string(),
            "noise_std": noise_std,
            "by_ratio": args.by_ratio,
        }),
    )?;

    let human = vec![format!(
        "evaluated {} pairs: mean F1 {:.4}",
        pairs.len(),
        report.mean_f1
    )];
    let mut summary = report.summary();
    if let Some(obj) = summary.as_object_mut() {
        obj.insert("command".into(), "eval".into());
        obj.insert("out".into(), globals.out.display().to_string().into());
    }
    emit_summary(globals, &human, summary);
    Ok(())
}

use std::path::PathBuf;
use std::time::Duration;

use clap::Args;

use aednet::{load_model_checkpoint, Model};
use harness::{bench_runtime, BenchOptions};

use super::{emit_summary, ensure_out_dir, load_pairs, path_from_config, write_manifest, write_text};
use crate::config_file::{resolve_opt, ConfigFile};
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct BenchArgs {
    /// Pair file to benchmark
    #[arg(long)]
    pairs: Option<PathBuf>,

    /// Checkpoint for the model-inference column (omit to skip it)
    #[arg(long)]
    ckpt: Option<PathBuf>,

    /// Wall-clock budget per exact enumeration, seconds
    #[arg(long)]
    deadline: Option<f64>,
}

pub fn run(globals: &Globals, file: &ConfigFile, args: BenchArgs) -> Result<(), CliError> {
    let pairs_path = args
        .pairs
        .or(path_from_config(file, "bench", "pairs")?)
        .ok_or_else(|| CliError::usage("--pairs <file> is required"))?;
    let ckpt = match args.ckpt {
        Some(c) => Some(c),
        None => path_from_config(file, "bench", "ckpt")?,
    };
    let deadline = resolve_opt(args.deadline, file.get("bench", "deadline"))?;

    let pairs = load_pairs(&pairs_path)?;
    let loaded = match &ckpt {
        Some(path) => {
            let (store, cfg, vocab) = load_model_checkpoint(path)?;
            Some((Model::new(cfg)?, store, vocab))
        }
        None => None,
    };

    let options = BenchOptions {
        exact_all: true,
        exact_first: true,
        model: loaded
            .as_ref()
            .map(|(m, s, v)| (m, s, v.as_ref())),
        deadline: deadline.map(Duration::from_secs_f64),
    };
    let report = bench_runtime(&pairs, &options)?;

    ensure_out_dir(&globals.out)?;
    write_text(&globals.out.join("bench.csv"), &report.to_csv())?;

    write_manifest(
        globals,
        "bench",
        serde_json::json!({
            "pairs": pairs_path.display().to_string(),
            "ckpt": ckpt.as_ref().map(|c| c.display().to_string()),
            "deadline": deadline,
        }),
    )?;

    let human: Vec<String> = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "pair {}: |G|={} |E|={} exact-all={:?}s exact-first={:?}s model={:?}s",
                r.index, r.data_size, r.data_edges, r.exact_all_secs, r.exact_first_secs, r.model_secs
            )
        })
        .collect();
    let mut summary = report.summary();
    if let Some(obj) = summary.as_object_mut() {
        obj.insert("command".into(), "bench".into());
        obj.insert("out".into(), globals.out.display().to_string().into());
    }
    emit_summary(globals, &human, summary);
    Ok(())
}

use std::path::PathBuf;
use std::time::Duration;

use clap::Args;

use exact_match::{enumerate_mappings, MatchMode, MatchOptions};

use super::{emit_summary, ensure_out_dir, load_pairs, path_from_config, write_manifest, write_text};
use crate::config_file::{resolve, resolve_opt, ConfigFile};
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct MatchArgs {
    /// Pair file to match (one record per line)
    #[arg(long)]
    pairs: Option<PathBuf>,

    /// all | first | exists
    #[arg(long)]
    mode: Option<String>,

    /// Wall-clock budget per pair, seconds
    #[arg(long)]
    deadline: Option<f64>,

    /// Cap on enumerated mappings per pair
    #[arg(long)]
    limit: Option<usize>,

    /// Drop the induced requirement (query non-edges may map onto edges)
    #[arg(long)]
    non_induced: bool,
}

pub fn run(globals: &Globals, file: &ConfigFile, args: MatchArgs) -> Result<(), CliError> {
    let pairs_path = args
        .pairs
        .or(path_from_config(file, "match", "pairs")?)
        .ok_or_else(|| CliError::usage("--pairs <file> is required"))?;
    let mode_raw = resolve(args.mode, file.get("match", "mode"), "all".to_string())?;
    let deadline = resolve_opt(args.deadline, file.get("match", "deadline"))?;
    let limit = resolve_opt(args.limit, file.get("match", "limit"))?;

    let mode = match mode_raw.as_str() {
        "all" => MatchMode::All,
        "first" => MatchMode::First,
        "exists" => MatchMode::Exists,
        other => return Err(CliError::usage(format!("unknown --mode {other:?}"))),
    };
    let options = MatchOptions {
        mode,
        limit,
        deadline: deadline.map(Duration::from_secs_f64),
        non_induced: args.non_induced,
    };

    let pairs = load_pairs(&pairs_path)?;
    ensure_out_dir(&globals.out)?;

    let mut lines = String::new();
    let mut total_mappings = 0usize;
    let mut found_count = 0usize;
    let mut human = Vec::new();
    for (i, pair) in pairs.iter().enumerate() {
        let outcome = enumerate_mappings(pair.data_graph(), pair.query_graph(), &options)?;
        total_mappings += outcome.mappings.len();
        found_count += outcome.found as usize;
        let record = serde_json::json!({
            "pair": i,
            "found": outcome.found,
            "count": outcome.mappings.len(),
            "truncated": outcome.truncated,
            "timed_out": outcome.timed_out,
            "recursions": outcome.stats.recursion_calls,
            "wall_secs": outcome.stats.wall_time.as_secs_f64(),
            "mappings": outcome.mappings.iter().map(|m| m.assignment().to_vec()).collect::<Vec<_>>(),
        });
        lines.push_str(&serde_json::to_string(&record).expect("record"));
        lines.push('\n');
        human.push(format!(
            "pair {i}: found={} mappings={} recursions={} time={:.6}s",
            outcome.found,
            outcome.mappings.len(),
            outcome.stats.recursion_calls,
            outcome.stats.wall_time.as_secs_f64()
        ));
    }
    write_text(&globals.out.join("matches.jsonl"), &lines)?;

    write_manifest(
        globals,
        "match",
        serde_json::json!({
            "pairs": pairs_path.display().to_string(),
            "mode": mode_raw,
            "deadline": deadline,
            "limit": limit,
            "non_induced": args.non_induced,
        }),
    )?;
    emit_summary(
        globals,
        &human,
        serde_json::json!({
            "command": "match",
            "pairs": pairs.len(),
            "found": found_count,
            "total_mappings": total_mappings,
            "out": globals.out.display().to_string(),
        }),
    );
    Ok(())
}

use std::path::Path;

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graph_core::{write_pairs, LabeledGraph};
use pairgen::{generate_pairs, generate_synthetic_corpus, GenConfig, SyntheticParams};

use super::{emit_summary, ensure_out_dir, mix_seed, write_manifest};
use crate::config_file::{resolve, ConfigFile};
use crate::error::CliError;
use crate::Globals;

#[derive(Args)]
pub struct GenArgs {
    /// Corpus source: `synthetic` or `tud:<directory>`
    #[arg(long)]
    source: Option<String>,

    /// Total number of pairs across all splits
    #[arg(long)]
    num: Option<usize>,

    /// Smallest query size
    #[arg(long)]
    qmin: Option<usize>,

    /// Largest query size
    #[arg(long)]
    qmax: Option<usize>,

    /// train:val:test proportions, e.g. 80:10:10
    #[arg(long)]
    split: Option<String>,

    /// Synthetic corpus: number of graphs
    #[arg(long)]
    graphs: Option<usize>,

    /// Synthetic corpus: smallest graph size
    #[arg(long)]
    nmin: Option<usize>,

    /// Synthetic corpus: largest graph size
    #[arg(long)]
    nmax: Option<usize>,

    /// Synthetic corpus: edge probability
    #[arg(long)]
    edge_prob: Option<f64>,

    /// Synthetic corpus: label vocabulary size (0 = featureless)
    #[arg(long)]
    labels: Option<u64>,

    /// Cap on enumerated mappings per pair (pairs over the cap are
    /// flagged truncated)
    #[arg(long)]
    map_cap: Option<usize>,
}

fn parse_split(s: &str) -> Result<[u64; 3], CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::usage(format!(
            "--split expects train:val:test, got {s:?}"
        )));
    }
    let mut out = [0u64; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .parse()
            .map_err(|_| CliError::usage(format!("bad split component {p:?}")))?;
    }
    if out.iter().sum::<u64>() == 0 {
        return Err(CliError::usage("split proportions sum to zero"));
    }
    Ok(out)
}

pub fn run(globals: &Globals, file: &ConfigFile, args: GenArgs) -> Result<(), CliError> {
    let source = resolve(args.source, file.get("gen", "source"), "synthetic".to_string())?;
    let num = resolve(args.num, file.get("gen", "num"), 100)?;
    let qmin = resolve(args.qmin, file.get("gen", "qmin"), 5)?;
    let qmax = resolve(args.qmax, file.get("gen", "qmax"), 8)?;
    let split_raw = resolve(args.split, file.get("gen", "split"), "80:10:10".to_string())?;
    let graphs = resolve(args.graphs, file.get("gen", "graphs"), 50)?;
    let nmin = resolve(args.nmin, file.get("gen", "nmin"), 15)?;
    let nmax = resolve(args.nmax, file.get("gen", "nmax"), 25)?;
    let edge_prob = resolve(args.edge_prob, file.get("gen", "edge_prob"), 0.3)?;
    let labels = resolve(args.labels, file.get("gen", "labels"), 4)?;
    let map_cap = resolve(args.map_cap, file.get("gen", "map_cap"), 1000)?;

    if qmin == 0 || qmin > qmax {
        return Err(CliError::usage(format!("bad query size range {qmin}..{qmax}")));
    }
    if num == 0 {
        return Err(CliError::usage("--num must be >= 1"));
    }
    let split = parse_split(&split_raw)?;
    let labels = u32::try_from(labels).map_err(|_| CliError::usage("--labels out of range"))?;

    let corpus: Vec<LabeledGraph> = if source == "synthetic" {
        let params = SyntheticParams {
            num_graphs: graphs,
            nodes_min: nmin,
            nodes_max: nmax,
            edge_prob,
            label_count: labels,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(globals.seed, 0));
        generate_synthetic_corpus(&params, &mut rng)?
    } else if let Some(dir) = source.strip_prefix("tud:") {
        graph_core::load_tudataset(Path::new(dir))?
    } else {
        return Err(CliError::usage(format!(
            "unknown --source {source:?} (expected `synthetic` or `tud:<dir>`)"
        )));
    };

    let total_weight: u64 = split.iter().sum();
    let n_train = (num as u64 * split[0] / total_weight) as usize;
    let n_val = (num as u64 * split[1] / total_weight) as usize;
    let n_test = num - n_train - n_val;

    ensure_out_dir(&globals.out)?;
    let mut counts = Vec::new();
    let mut truncated_total = 0;
    let mut skipped = 0;
    for (name, count, salt) in [
        ("train", n_train, 1u64),
        ("val", n_val, 2),
        ("test", n_test, 3),
    ] {
        let path = globals.out.join(format!("{name}.pairs"));
        if count == 0 {
            write_pairs(&path, &[])?;
            counts.push((name, 0usize, 0usize));
            continue;
        }
        let cfg = GenConfig {
            mapping_cap: map_cap,
            ..GenConfig::new(qmin, qmax, count, mix_seed(globals.seed, salt))
        };
        let output = generate_pairs(&cfg, &corpus)?;
        write_pairs(&path, &output.pairs)?;
        truncated_total += output.truncated_pairs;
        skipped = output.skipped_graphs;
        counts.push((name, output.pairs.len(), output.truncated_pairs));
    }

    write_manifest(
        globals,
        "gen",
        serde_json::json!({
            "source": source,
            "num": num,
            "qmin": qmin,
            "qmax": qmax,
            "split": split_raw,
            "graphs": graphs,
            "nmin": nmin,
            "nmax": nmax,
            "edge_prob": edge_prob,
            "labels": labels,
            "map_cap": map_cap,
        }),
    )?;

    let human: Vec<String> = counts
        .iter()
        .map(|(name, n, trunc)| format!("{name}: {n} pairs ({trunc} truncated)"))
        .chain([format!("corpus graphs skipped as too small: {skipped}")])
        .collect();
    emit_summary(
        globals,
        &human,
        serde_json::json!({
            "command": "gen",
            "train": counts[0].1,
            "val": counts[1].1,
            "test": counts[2].1,
            "truncated": truncated_total,
            "skipped_graphs": skipped,
            "out": globals.out.display().to_string(),
        }),
    );
    Ok(())
}

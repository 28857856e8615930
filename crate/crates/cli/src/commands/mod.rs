pub mod ablate;
pub mod bench;
pub mod eval;
pub mod gen;
pub mod match_cmd;
pub mod train;

use std::path::{Path, PathBuf};

use graph_core::{FeatureKind, LabelVocabulary, MatchPair};

use crate::error::CliError;
use crate::Globals;

/// Derive an independent sub-seed for a named stage of a run.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn ensure_out_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Every run records its full effective configuration and seed, enough to
/// reproduce the run byte for byte.
pub fn write_manifest(
    globals: &Globals,
    command: &str,
    effective: serde_json::Value,
) -> Result<(), CliError> {
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": globals.seed,
        "out": globals.out.display().to_string(),
        "config": effective,
    });
    let path = globals.out.join("manifest.json");
    write_text(&path, &format!("{}\n", serde_json::to_string_pretty(&manifest).expect("manifest")))
}

/// Machine summary line on stdout, or human lines under --verbose.
pub fn emit_summary(globals: &Globals, human: &[String], summary: serde_json::Value) {
    if globals.verbose {
        for line in human {
            println!("{line}");
        }
    } else {
        println!("{}", serde_json::to_string(&summary).expect("summary"));
    }
}

pub fn load_pairs(path: &Path) -> Result<Vec<MatchPair>, CliError> {
    let pairs = graph_core::read_pairs(path)?;
    if pairs.is_empty() {
        return Err(CliError::Data(format!("{}: no pairs", path.display())));
    }
    Ok(pairs)
}

/// Vocabulary and input width implied by a pair set's feature kind.
pub fn derive_encoding(pairs: &[MatchPair]) -> (Option<LabelVocabulary>, usize) {
    let first = &pairs[0];
    match first.data_graph().feature_kind() {
        FeatureKind::None => (None, 1),
        FeatureKind::Numerical => (
            None,
            first.data_graph().features().numerical_dim().unwrap_or(1),
        ),
        FeatureKind::Categorical => {
            let vocab = LabelVocabulary::from_graphs(
                pairs.iter().flat_map(|p| [p.data_graph(), p.query_graph()]),
            );
            let dim = vocab.len();
            (Some(vocab), dim)
        }
    }
}

pub fn path_from_config(
    file: &crate::config_file::ConfigFile,
    section: &str,
    key: &str,
) -> Result<Option<PathBuf>, CliError> {
    Ok(file.get::<String>(section, key)?.map(PathBuf::from))
}

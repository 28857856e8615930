use std::collections::BTreeMap;
use std::path::Path;

use graph_core::LabelVocabulary;
use numerics::{load_checkpoint, save_checkpoint, ParamStore};

use crate::{ModelConfig, ModelError, Result};

const MODEL_META_KEY: &str = "model";
const VOCAB_META_KEY: &str = "vocab";

/// Save parameters with the model configuration (and the label vocabulary
/// for categorical features) embedded in the header, so a checkpoint alone
/// is enough to rebuild the model for evaluation.
pub fn save_model_checkpoint(
    path: &Path,
    store: &ParamStore,
    cfg: &ModelConfig,
    vocabulary: Option<&LabelVocabulary>,
) -> Result<()> {
    let mut meta = BTreeMap::new();
    meta.insert(
        MODEL_META_KEY.to_string(),
        serde_json::to_string(cfg).expect("config serializes"),
    );
    if let Some(vocab) = vocabulary {
        let labels: Vec<u32> = vocab.labels().collect();
        meta.insert(
            VOCAB_META_KEY.to_string(),
            serde_json::to_string(&labels).expect("labels serialize"),
        );
    }
    save_checkpoint(path, store, &meta)?;
    Ok(())
}

pub fn load_model_checkpoint(
    path: &Path,
) -> Result<(ParamStore, ModelConfig, Option<LabelVocabulary>)> {
    let (store, meta) = load_checkpoint(path)?;
    let raw = meta
        .get(MODEL_META_KEY)
        .ok_or_else(|| ModelError::Config(format!("{}: checkpoint has no model config", path.display())))?;
    let cfg: ModelConfig = serde_json::from_str(raw)
        .map_err(|e| ModelError::Config(format!("{}: bad model config: {e}", path.display())))?;
    let vocabulary = match meta.get(VOCAB_META_KEY) {
        Some(raw) => {
            let labels: Vec<u32> = serde_json::from_str(raw)
                .map_err(|e| ModelError::Config(format!("{}: bad vocabulary: {e}", path.display())))?;
            Some(LabelVocabulary::from_labels(labels))
        }
        None => None,
    };
    Ok((store, cfg, vocabulary))
}

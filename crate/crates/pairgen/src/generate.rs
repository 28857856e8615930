use graph_core::{LabeledGraph, MatchPair};
use rand::Rng;
use rayon::prelude::*;

use crate::{sample_connected_subgraph, sample_rng, GenError};
use exact_match::{enumerate_mappings, MatchOptions};

pub const DEFAULT_MAPPING_CAP: usize = 1000;

#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Inclusive query-size range.
    pub query_size_min: usize,
    pub query_size_max: usize,
    pub num_samples: usize,
    pub seed: u64,
    /// Cap on enumerated mappings per pair; pairs that exceed it keep the
    /// capped set (always including the extraction mapping) and are
    /// flagged truncated.
    pub mapping_cap: usize,
}

impl GenConfig {
    pub fn new(query_size_min: usize, query_size_max: usize, num_samples: usize, seed: u64) -> Self {
        GenConfig {
            query_size_min,
            query_size_max,
            num_samples,
            seed,
            mapping_cap: DEFAULT_MAPPING_CAP,
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.query_size_min == 0 || self.query_size_min > self.query_size_max {
            return Err(GenError::InvalidConfig(format!(
                "invalid query size range [{}, {}]",
                self.query_size_min, self.query_size_max
            )));
        }
        if self.num_samples == 0 {
            return Err(GenError::InvalidConfig("num_samples must be >= 1".into()));
        }
        if self.mapping_cap == 0 {
            return Err(GenError::InvalidConfig("mapping_cap must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct GenOutput {
    pub pairs: Vec<MatchPair>,
    /// Corpus graphs too small for the whole query-size range, skipped.
    pub skipped_graphs: usize,
    /// Pairs whose mapping set hit the cap.
    pub truncated_pairs: usize,
}

/// Generate `num_samples` pairs: uniformly pick an eligible corpus graph
/// and a query size, extract a connected induced subgraph, and enumerate
/// its full mapping set. Each sample draws from an independent random
/// stream derived from `(seed, index)`, so generation is deterministic and
/// embarrassingly parallel.
pub fn generate_pairs(cfg: &GenConfig, corpus: &[LabeledGraph]) -> Result<GenOutput, GenError> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(GenError::InvalidConfig("corpus is empty".into()));
    }

    // A graph is eligible when its largest component supports the whole
    // size range, so any drawn size fits.
    let eligible: Vec<&LabeledGraph> = corpus
        .iter()
        .filter(|g| {
            g.connected_components()
                .iter()
                .map(|c| c.len())
                .max()
                .unwrap_or(0)
                >= cfg.query_size_max
        })
        .collect();
    let skipped_graphs = corpus.len() - eligible.len();
    if eligible.is_empty() {
        return Err(GenError::NoEligibleGraphs(cfg.query_size_max));
    }
    if skipped_graphs > 0 {
        log::warn!(
            "skipping {skipped_graphs} corpus graphs without a component of {} nodes",
            cfg.query_size_max
        );
    }

    let pairs: Vec<MatchPair> = (0..cfg.num_samples)
        .into_par_iter()
        .map(|index| generate_one(cfg, &eligible, index as u64))
        .collect::<Result<_, GenError>>()?;

    let truncated_pairs = pairs.iter().filter(|p| p.is_truncated()).count();
    Ok(GenOutput {
        pairs,
        skipped_graphs,
        truncated_pairs,
    })
}

fn generate_one(cfg: &GenConfig, eligible: &[&LabeledGraph], index: u64) -> Result<MatchPair, GenError> {
    let mut rng = sample_rng(cfg.seed, index + 1);
    let data = eligible[rng.gen_range(0..eligible.len())];
    let size = rng.gen_range(cfg.query_size_min..=cfg.query_size_max);
    let (query, extraction) = sample_connected_subgraph(data, size, &mut rng)?;

    let outcome = enumerate_mappings(
        data,
        &query,
        &MatchOptions {
            limit: Some(cfg.mapping_cap),
            ..Default::default()
        },
    )?;
    let mut mappings = outcome.mappings;
    if !mappings.contains(&extraction) {
        debug_assert!(
            outcome.truncated,
            "a complete enumeration must contain the extraction mapping"
        );
        mappings.push(extraction);
    }
    Ok(MatchPair::new(data.clone(), query, mappings, outcome.truncated)?)
}

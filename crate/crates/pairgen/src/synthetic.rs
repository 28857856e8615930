use graph_core::{LabeledGraph, NodeFeatures};
use rand::Rng;

use crate::GenError;

const MAX_CONSECUTIVE_REJECTIONS: usize = 1000;

/// Erdős–Rényi-style generator restricted to connected draws.
#[derive(Debug, Clone)]
pub struct SyntheticParams {
    pub num_graphs: usize,
    pub nodes_min: usize,
    pub nodes_max: usize,
    pub edge_prob: f64,
    /// Size of the categorical label vocabulary; 0 generates featureless
    /// graphs.
    pub label_count: u32,
}

impl SyntheticParams {
    fn validate(&self) -> Result<(), GenError> {
        if self.num_graphs == 0 {
            return Err(GenError::InvalidConfig("num_graphs must be >= 1".into()));
        }
        if self.nodes_min == 0 || self.nodes_min > self.nodes_max {
            return Err(GenError::InvalidConfig(format!(
                "invalid node range [{}, {}]",
                self.nodes_min, self.nodes_max
            )));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) {
            return Err(GenError::InvalidConfig(format!(
                "edge probability {} outside [0, 1]",
                self.edge_prob
            )));
        }
        Ok(())
    }
}

/// Draw connected graphs with labels sampled uniformly from the
/// vocabulary. Disconnected draws are rejected and resampled; a long
/// rejection streak aborts with advice to use denser parameters.
pub fn generate_synthetic_corpus(
    params: &SyntheticParams,
    rng: &mut impl Rng,
) -> Result<Vec<LabeledGraph>, GenError> {
    params.validate()?;
    let mut corpus = Vec::with_capacity(params.num_graphs);
    let mut rejections = 0usize;
    while corpus.len() < params.num_graphs {
        let n = rng.gen_range(params.nodes_min..=params.nodes_max);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.gen_bool(params.edge_prob) {
                    edges.push((a, b));
                }
            }
        }
        let features = if params.label_count > 0 {
            NodeFeatures::Categorical((0..n).map(|_| rng.gen_range(0..params.label_count)).collect())
        } else {
            NodeFeatures::None
        };
        let graph = LabeledGraph::new(n, edges, features, None)?;
        if graph.is_connected() {
            corpus.push(graph);
            rejections = 0;
        } else {
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(GenError::SynthesisFailed(rejections));
            }
        }
    }
    Ok(corpus)
}

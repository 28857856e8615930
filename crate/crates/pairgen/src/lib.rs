//! Pair generation: turn a corpus of single graphs into (data graph,
//! query graph, ground truth) samples by extracting random connected
//! induced subgraphs and enumerating their full mapping sets.

mod generate;
mod subgraph;
mod synthetic;

pub use generate::{generate_pairs, GenConfig, GenOutput};
pub use subgraph::sample_connected_subgraph;
pub use synthetic::{generate_synthetic_corpus, SyntheticParams};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generation config: {0}")]
    InvalidConfig(String),

    #[error("no corpus graph has a connected component of {0} nodes")]
    NoEligibleGraphs(usize),

    #[error("no connected component with at least {0} nodes")]
    NoComponentLargeEnough(usize),

    #[error("{0} consecutive disconnected draws; increase edge probability or reduce node count")]
    SynthesisFailed(usize),

    #[error(transparent)]
    Graph(#[from] graph_core::GraphError),

    #[error(transparent)]
    Match(#[from] exact_match::MatchError),
}

/// Independent per-sample random stream: stream `index` of a ChaCha
/// generator keyed by `seed`, so parallel and serial generation agree.
pub(crate) fn sample_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

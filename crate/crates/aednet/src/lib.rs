//! Attention-based subgraph matching model with two coupled mechanisms:
//! unidirectional cross-propagation (data-graph embeddings are softly
//! routed into the query graph through a learnable-temperature similarity
//! softmax, which doubles as the predicted matching matrix) and sample-wise
//! adaptive edge deleting (a per-pair attention query vector, trained so
//! that data-graph edges with no counterpart at the matched query node
//! receive near-zero attention weight).

mod checkpoint;
mod config;
mod inputs;
mod loss;
mod model;
mod ops;
mod params;
mod trace;

pub use checkpoint::{load_model_checkpoint, save_model_checkpoint};
pub use config::{ModelConfig, Pooling};
pub use inputs::{NeighborPartition, PairInputs, PartitionEntry, Supervision};
pub use loss::{edge_delete_loss, matching_loss, total_loss, LossBreakdown};
pub use model::{extract_top1, ForwardPass, LayerVars, Model};
pub use ops::{attention_coefficients, cross_propagate, sample_query};
pub use params::init_params;
pub use trace::{delete_mass, LayerRecord, LayerTrace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    Config(String),

    #[error("feature dim {got} does not match configured input dim {expected}")]
    FeatureDim { expected: usize, got: usize },

    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),

    #[error(transparent)]
    Graph(#[from] graph_core::GraphError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

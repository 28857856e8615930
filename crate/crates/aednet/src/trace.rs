use numerics::{Graph, Tensor};

use crate::model::ForwardPass;
use crate::{NeighborPartition, PairInputs};

/// Concrete per-layer values extracted from a forward pass, for
/// diagnostics and loss bookkeeping outside the tape.
#[derive(Debug, Clone)]
pub struct LayerRecord {
    pub h_query: Tensor,
    pub h_data: Tensor,
    /// Predicted matrix entering this layer; absent at layer 1.
    pub matrix: Option<Tensor>,
    pub attn_data: Vec<Tensor>,
    pub attn_query: Vec<Tensor>,
}

#[derive(Debug, Clone)]
pub struct LayerTrace {
    pub layers: Vec<LayerRecord>,
    pub final_matrix: Tensor,
}

impl LayerTrace {
    /// Copy values out of the tape. Attention rows of isolated nodes hold
    /// a dummy softmax the model never consumes; they are zeroed here so
    /// the trace reflects the (empty) neighborhoods.
    pub fn from_pass(graph: &Graph, pass: &ForwardPass, inputs: &PairInputs) -> Self {
        let clean = |attn: &Tensor, nonisolated: &Tensor| {
            let mut out = attn.clone();
            for i in 0..out.rows() {
                if nonisolated.get(i, 0) == 0.0 {
                    for j in 0..out.cols() {
                        out.set(i, j, 0.0);
                    }
                }
            }
            out
        };
        let layers = pass
            .layers
            .iter()
            .map(|layer| LayerRecord {
                h_query: graph.value(layer.h_query).clone(),
                h_data: graph.value(layer.h_data).clone(),
                matrix: layer.matrix.map(|m| graph.value(m).clone()),
                attn_data: layer
                    .attn_data
                    .iter()
                    .map(|&a| clean(graph.value(a), &inputs.data_nonisolated))
                    .collect(),
                attn_query: layer
                    .attn_query
                    .iter()
                    .map(|&a| clean(graph.value(a), &inputs.query_nonisolated))
                    .collect(),
            })
            .collect();
        LayerTrace {
            layers,
            final_matrix: graph.value(pass.final_matrix).clone(),
        }
    }
}

/// Mean over matched nodes of the head-averaged attention mass on deleted
/// (extra-edge) neighbors, for one layer's data-graph attention tables.
pub fn delete_mass(attn_heads: &[Tensor], partition: &NeighborPartition) -> f64 {
    if partition.entries.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for entry in &partition.entries {
        let mut per_node = 0.0;
        for head in attn_heads {
            for &j in &entry.delete {
                per_node += head.get(entry.data_node, j);
            }
        }
        total += per_node / attn_heads.len() as f64;
    }
    total / partition.entries.len() as f64
}

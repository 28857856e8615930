use numerics::{bind_params, Graph, MlpVars, ParamBinding, ParamStore, Tensor, VarId};

use crate::ops::{attention_coefficients, cross_propagate, sample_query, LEAKY_SLOPE};
use crate::params::{head_static_a, head_w, input_b, input_w, layer_mlp, q_mlp, tau_name};
use crate::{ModelConfig, PairInputs, Result};

/// Tape handles produced by one layer: the predicted matrix entering the
/// layer (layers 2 and up), per-head attention tables for both graphs, and
/// the output embeddings.
pub struct LayerVars {
    pub matrix: Option<VarId>,
    pub attn_data: Vec<VarId>,
    pub attn_query: Vec<VarId>,
    pub h_query: VarId,
    pub h_data: VarId,
}

pub struct ForwardPass {
    pub layers: Vec<LayerVars>,
    /// Predicted matching matrix from the trailing cross-propagation on
    /// the last embeddings; this is the model's output.
    pub final_matrix: VarId,
}

pub struct Model {
    cfg: ModelConfig,
}

impl Model {
    pub fn new(cfg: ModelConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Model { cfg })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    /// Full forward pass over the tape.
    ///
    /// Both graphs go through a shared linear input projection. The first
    /// layer runs without cross-propagation (raw features carry no
    /// structure yet): the query side attends over its own embeddings with
    /// a static learnable query vector, while the data side already uses
    /// the sample-wise query vector. From layer 2 on, cross-propagation
    /// produces the predicted matrix and the cross-information that
    /// replaces the query-graph embeddings in attention and messages
    /// (unless `no_cross`); residuals always add the graph's own previous
    /// embeddings.
    pub fn forward(
        &self,
        graph: &mut Graph,
        binding: &ParamBinding,
        inputs: &PairInputs,
    ) -> Result<ForwardPass> {
        let cfg = &self.cfg;
        let w_in = binding.var(&input_w())?;
        let b_in = binding.var(&input_b())?;

        let q_feat = graph.constant(inputs.query_features.clone())?;
        let d_feat = graph.constant(inputs.data_features.clone())?;
        let proj_q = graph.matmul(q_feat, w_in)?;
        let mut h_query = graph.add_row_bias(proj_q, b_in)?;
        let proj_d = graph.matmul(d_feat, w_in)?;
        let mut h_data = graph.add_row_bias(proj_d, b_in)?;

        let q_noniso = graph.constant(inputs.query_nonisolated.clone())?;
        let d_noniso = graph.constant(inputs.data_nonisolated.clone())?;

        let mut layers = Vec::with_capacity(cfg.layers);
        for t in 1..=cfg.layers {
            let (matrix, n_query) = if t >= 2 {
                let tau_pre = binding.var(&tau_name(cfg, t))?;
                let tau = graph.sigmoid(tau_pre)?;
                let (m_hat, n_q) = cross_propagate(graph, h_query, h_data, tau)?;
                (Some(m_hat), Some(n_q))
            } else {
                (None, None)
            };

            let query_source = match n_query {
                Some(n_q) if !cfg.no_cross => n_q,
                _ => h_query,
            };

            let mut data_parts = Vec::with_capacity(cfg.heads);
            let mut query_parts = Vec::with_capacity(cfg.heads);
            let mut attn_data = Vec::with_capacity(cfg.heads);
            let mut attn_query = Vec::with_capacity(cfg.heads);
            for head in 1..=cfg.heads {
                let w = binding.var(&head_w(t, head))?;
                let q_mlp_vars = MlpVars {
                    w1: binding.var(&q_mlp(t, head, "w1"))?,
                    b1: binding.var(&q_mlp(t, head, "b1"))?,
                    w2: binding.var(&q_mlp(t, head, "w2"))?,
                    b2: binding.var(&q_mlp(t, head, "b2"))?,
                };
                let q_vec = sample_query(graph, h_query, &q_mlp_vars, cfg.pooling)?;

                let (a_data, hw_data) =
                    attention_coefficients(graph, h_data, q_vec, w, &inputs.data_mask)?;
                let agg = graph.matmul(a_data, hw_data)?;
                let agg = graph.scale_rows(agg, d_noniso)?;
                data_parts.push(agg);
                attn_data.push(a_data);

                let query_attn_vec = if t == 1 {
                    binding.var(&head_static_a(head))?
                } else {
                    q_vec
                };
                let (a_query, hw_query) =
                    attention_coefficients(graph, query_source, query_attn_vec, w, &inputs.query_mask)?;
                let agg = graph.matmul(a_query, hw_query)?;
                let agg = graph.scale_rows(agg, q_noniso)?;
                query_parts.push(agg);
                attn_query.push(a_query);
            }

            let mlp_vars = MlpVars {
                w1: binding.var(&layer_mlp(t, "w1"))?,
                b1: binding.var(&layer_mlp(t, "b1"))?,
                w2: binding.var(&layer_mlp(t, "w2"))?,
                b2: binding.var(&layer_mlp(t, "b2"))?,
            };
            let cat_data = graph.concat_cols(&data_parts)?;
            let out_data = graph.mlp_apply(cat_data, &mlp_vars, LEAKY_SLOPE)?;
            let next_data = graph.add(out_data, h_data)?;
            let cat_query = graph.concat_cols(&query_parts)?;
            let out_query = graph.mlp_apply(cat_query, &mlp_vars, LEAKY_SLOPE)?;
            let next_query = graph.add(out_query, h_query)?;

            layers.push(LayerVars {
                matrix,
                attn_data,
                attn_query,
                h_query: next_query,
                h_data: next_data,
            });
            h_query = next_query;
            h_data = next_data;
        }

        let tau_pre = binding.var(&tau_name(cfg, cfg.layers + 1))?;
        let tau = graph.sigmoid(tau_pre)?;
        let (final_matrix, _) = cross_propagate(graph, h_query, h_data, tau)?;
        Ok(ForwardPass { layers, final_matrix })
    }

    /// Inference: fresh tape, forward, return the final matrix value.
    pub fn predict(&self, store: &ParamStore, inputs: &PairInputs) -> Result<Tensor> {
        let mut graph = Graph::new();
        let binding = bind_params(&mut graph, store)?;
        let pass = self.forward(&mut graph, &binding, inputs)?;
        Ok(graph.value(pass.final_matrix).clone())
    }
}

/// Top-1 prediction: each row's argmax column, ties broken toward the
/// lowest index. Injectivity is deliberately not enforced; duplicate
/// targets count as at most one correct match downstream.
pub fn extract_top1(matrix: &Tensor) -> Vec<usize> {
    (0..matrix.rows())
        .map(|i| {
            let row = matrix.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top1_takes_row_argmax_with_low_tie_break() {
        let m = Tensor::from_rows(&[
            vec![0.2, 0.5, 0.3],
            vec![1.0, 0.0, 0.0],
            vec![0.4, 0.2, 0.4],
        ]);
        assert_eq!(extract_top1(&m), vec![1, 0, 0]);
    }
}

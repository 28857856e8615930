//! Training losses and their layer schedule.

use numerics::{Axis, Graph, Tensor, VarId};

use crate::model::ForwardPass;
use crate::{ModelError, Result, Supervision};

/// Matching loss for one predicted matrix: per query row, the mass on
/// matched columns minus the mass on unmatched columns should be 1
/// (everything on matched columns); the loss is the mean absolute
/// deviation from that target.
pub fn matching_loss(graph: &mut Graph, m_hat: VarId, sup: &Supervision) -> Result<VarId> {
    let matched = graph.constant(sup.matched.clone())?;
    let unmatched = graph.constant(sup.unmatched.clone())?;
    let pos = graph.mul(m_hat, matched)?;
    let pos = graph.sum_axis(pos, Axis::Cols)?;
    let neg = graph.mul(m_hat, unmatched)?;
    let neg = graph.sum_axis(neg, Axis::Cols)?;
    let diff = graph.sub(pos, neg)?;
    let ones = graph.constant(Tensor::full(sup.query_size, 1, 1.0))?;
    let dev = graph.sub(diff, ones)?;
    let abs = graph.row_l2_norm(dev)?;
    Ok(graph.mean_axis(abs, Axis::Rows)?)
}

/// Edge-deleting loss for one layer's data-graph attention: for each
/// matched node, attention mass on kept neighbors minus mass on deleted
/// neighbors should be 1 (all mass on kept edges), averaged over heads;
/// the loss is the mean absolute deviation over matched nodes.
pub fn edge_delete_loss(graph: &mut Graph, attn_heads: &[VarId], sup: &Supervision) -> Result<VarId> {
    if attn_heads.is_empty() {
        return Err(ModelError::Config("edge_delete_loss needs at least one head".into()));
    }
    let mut acc = attn_heads[0];
    for &head in &attn_heads[1..] {
        acc = graph.add(acc, head)?;
    }
    let mean = graph.scale(acc, 1.0 / attn_heads.len() as f64)?;
    let sign = graph.constant(sup.sign.clone())?;
    let signed = graph.mul(mean, sign)?;
    let balance = graph.sum_axis(signed, Axis::Cols)?;
    let rows = graph.value(balance).rows();
    let ones = graph.constant(Tensor::full(rows, 1, 1.0))?;
    let dev = graph.sub(balance, ones)?;
    let abs = graph.row_l2_norm(dev)?;
    let delta = graph.constant(sup.delta.clone())?;
    let only_matched = graph.mul(abs, delta)?;
    let sum = graph.sum_axis(only_matched, Axis::Rows)?;
    Ok(graph.scale(sum, 1.0 / sup.query_size as f64)?)
}

/// Combine per-layer losses: layer t pairs its edge-deleting loss with the
/// matching loss of the next layer's matrix; interior layers are weighted
/// by lambda2 against the last layer.
pub fn total_loss(
    graph: &mut Graph,
    delete_losses: &[VarId],
    matching_losses: &[VarId],
    lambda1: f64,
    lambda2: f64,
) -> Result<VarId> {
    let layers = delete_losses.len();
    if layers < 2 || matching_losses.len() != layers {
        return Err(ModelError::Config(format!(
            "loss schedule needs T >= 2 with paired losses, got {} and {}",
            layers,
            matching_losses.len()
        )));
    }
    let mut per_layer = Vec::with_capacity(layers);
    for i in 0..layers {
        let de = graph.scale(delete_losses[i], lambda1)?;
        let m = graph.scale(matching_losses[i], 1.0 - lambda1)?;
        per_layer.push(graph.add(de, m)?);
    }
    let mut interior = per_layer[0];
    for &l in &per_layer[1..layers - 1] {
        interior = graph.add(interior, l)?;
    }
    let interior = graph.scale(interior, lambda2)?;
    let last = graph.scale(per_layer[layers - 1], 1.0 - lambda2)?;
    Ok(graph.add(interior, last)?)
}

/// Tape handles of every loss component of one training forward.
pub struct LossBreakdown {
    pub total: VarId,
    /// Edge-deleting loss per layer (t = 1..=T).
    pub delete: Vec<VarId>,
    /// Matching losses of the matrices from layers 2..=T and the trailing
    /// propagation, in schedule order (paired with layers 1..=T).
    pub matching: Vec<VarId>,
}

impl crate::Model {
    /// Forward plus the full loss schedule.
    pub fn training_loss(
        &self,
        graph: &mut Graph,
        binding: &numerics::ParamBinding,
        inputs: &crate::PairInputs,
        sup: &Supervision,
    ) -> Result<(ForwardPass, LossBreakdown)> {
        let pass = self.forward(graph, binding, inputs)?;
        let cfg = self.config();

        let mut delete_losses = Vec::with_capacity(cfg.layers);
        for layer in &pass.layers {
            delete_losses.push(edge_delete_loss(graph, &layer.attn_data, sup)?);
        }
        let mut matching_losses = Vec::with_capacity(cfg.layers);
        for layer in &pass.layers[1..] {
            let m_hat = layer.matrix.expect("layers 2.. carry a matrix");
            matching_losses.push(matching_loss(graph, m_hat, sup)?);
        }
        matching_losses.push(matching_loss(graph, pass.final_matrix, sup)?);

        let total = total_loss(graph, &delete_losses, &matching_losses, cfg.lambda1, cfg.lambda2)?;
        Ok((
            pass,
            LossBreakdown {
                total,
                delete: delete_losses,
                matching: matching_losses,
            },
        ))
    }
}

//! Differentiable building blocks of the model, expressed over the tape.

use numerics::{Axis, Graph, MlpVars, Tensor, VarId};

use crate::{Pooling, Result};

pub(crate) const LEAKY_SLOPE: f64 = 0.2;

/// Route data-graph embeddings into the query graph: the row-stochastic
/// |Q| x |G| matrix softmax(cos(h_q, h_g) / tau) is both the predicted
/// matching matrix and the propagation weights for the cross-information
/// `n_q = m_hat h_g`. Propagation is one-directional: `h_g` is untouched.
///
/// `tau` is the temperature variable, already constrained positive by the
/// caller (sigmoid of a pre-activation).
pub fn cross_propagate(
    graph: &mut Graph,
    h_query: VarId,
    h_data: VarId,
    tau: VarId,
) -> Result<(VarId, VarId)> {
    let sims = graph.cosine_similarity_matrix(h_query, h_data)?;
    let (q, g) = graph.value(sims).shape();
    let mask = Tensor::full(q, g, 1.0);
    let m_hat = graph.row_softmax_masked(sims, &mask, tau)?;
    let n_query = graph.matmul(m_hat, h_data)?;
    Ok((m_hat, n_query))
}

/// Sample-wise attention query vector: an MLP of the pooled query-graph
/// embedding, one per (layer, head).
pub fn sample_query(
    graph: &mut Graph,
    h_query: VarId,
    mlp: &MlpVars,
    pooling: Pooling,
) -> Result<VarId> {
    let pooled = match pooling {
        Pooling::Mean => graph.mean_axis(h_query, Axis::Rows)?,
        Pooling::Sum => graph.sum_axis(h_query, Axis::Rows)?,
        Pooling::Max => graph.max_axis(h_query, Axis::Rows)?,
    };
    Ok(graph.mlp_apply(pooled, mlp, LEAKY_SLOPE)?)
}

/// Masked attention over first-order neighborhoods.
///
/// For source embeddings H and attention query q = [q_l | q_r], the logit
/// for edge (i, j) is leaky_relu(q_l . (h_i W) + q_r . (h_j W)), i.e.
/// q . [h_i W | h_j W]^T, normalized by a masked softmax over each row's
/// neighbor set. Self-loops are not part of the neighborhood; rows without
/// neighbors are the caller's responsibility (their aggregation is zeroed).
///
/// Returns the attention table and the projected embeddings `H W` so the
/// caller can reuse them as messages.
pub fn attention_coefficients(
    graph: &mut Graph,
    source: VarId,
    query_vec: VarId,
    weight: VarId,
    mask: &Tensor,
) -> Result<(VarId, VarId)> {
    let projected = graph.matmul(source, weight)?;
    let dh = graph.value(projected).cols();
    let q_left = graph.slice_cols(query_vec, 0, dh)?;
    let q_right = graph.slice_cols(query_vec, dh, 2 * dh)?;
    let q_left_t = graph.transpose(q_left)?;
    let q_right_t = graph.transpose(q_right)?;
    let score_self = graph.matmul(projected, q_left_t)?;
    let score_neighbor = graph.matmul(projected, q_right_t)?;
    let logits = graph.outer_add(score_self, score_neighbor)?;
    let logits = graph.leaky_relu(logits, LEAKY_SLOPE)?;
    let one = graph.constant(Tensor::scalar(1.0))?;
    let attention = graph.row_softmax_masked(logits, mask, one)?;
    Ok((attention, projected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use numerics::Graph;

    #[test]
    fn cross_propagate_rows_are_stochastic() {
        let mut g = Graph::new();
        let hq = g
            .input(Tensor::from_rows(&[
                vec![0.3, -0.7, 1.1, 0.2],
                vec![1.0, 0.0, -0.5, 0.8],
                vec![-0.2, 0.4, 0.9, -1.3],
            ]))
            .unwrap();
        let hg = g
            .input(Tensor::randn(
                5,
                4,
                1.0,
                &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5),
            ))
            .unwrap();
        let tau = g.constant(Tensor::scalar(0.5)).unwrap();
        let (m_hat, n_q) = cross_propagate(&mut g, hq, hg, tau).unwrap();
        assert_eq!(g.value(m_hat).shape(), (3, 5));
        assert_eq!(g.value(n_q).shape(), (3, 4));
        for i in 0..3 {
            let s: f64 = g.value(m_hat).row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn matching_row_snaps_to_identical_embedding_at_low_temperature() {
        let mut g = Graph::new();
        // Query row 0 equals data row 2 and is orthogonal to the rest.
        let hq = g.input(Tensor::from_rows(&[vec![1.0, 0.0, 0.0]])).unwrap();
        let hg = g
            .input(Tensor::from_rows(&[
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ]))
            .unwrap();
        let tau = g.constant(Tensor::scalar(0.05)).unwrap();
        let (m_hat, n_q) = cross_propagate(&mut g, hq, hg, tau).unwrap();
        assert!(g.value(m_hat).get(0, 2) > 0.999);
        let cross = g.value(n_q);
        assert!((cross.get(0, 0) - 1.0).abs() < 2e-3);
        assert!(cross.get(0, 1).abs() < 2e-3);
    }

    #[test]
    fn single_data_node_gives_all_ones_column() {
        let mut g = Graph::new();
        let hq = g
            .input(Tensor::from_rows(&[vec![0.1, 0.2], vec![-1.0, 0.5]]))
            .unwrap();
        let hg = g.input(Tensor::from_rows(&[vec![2.0, -1.0]])).unwrap();
        let tau = g.constant(Tensor::scalar(1.0)).unwrap();
        let (m_hat, n_q) = cross_propagate(&mut g, hq, hg, tau).unwrap();
        assert_eq!(g.value(m_hat).data(), &[1.0, 1.0]);
        assert_eq!(g.value(n_q).row(0), &[2.0, -1.0]);
        assert_eq!(g.value(n_q).row(1), &[2.0, -1.0]);
    }

    #[test]
    fn pooled_query_is_node_order_invariant_under_mean() {
        let rows = [vec![0.5, 1.5], vec![-0.25, 2.0], vec![3.0, -1.0]];
        let permuted = [rows[2].clone(), rows[0].clone(), rows[1].clone()];

        let run = |rows: &[Vec<f64>]| {
            let mut g = Graph::new();
            let h = g.input(Tensor::from_rows(rows)).unwrap();
            let mlp = MlpVars {
                w1: g.input(Tensor::from_rows(&[vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]])).unwrap(),
                b1: g.input(Tensor::from_rows(&[vec![0.1, 0.0, -0.1, 0.2]])).unwrap(),
                w2: g.input(Tensor::randn(4, 4, 0.5, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3))).unwrap(),
                b2: g.input(Tensor::zeros(1, 4)).unwrap(),
            };
            let q = sample_query(&mut g, h, &mlp, Pooling::Mean).unwrap();
            g.value(q).data().to_vec()
        };

        let a = run(&rows);
        let b = run(&permuted);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_query_embeddings_and_zero_bias_mlp_give_zero_query() {
        let mut g = Graph::new();
        let h = g.input(Tensor::zeros(3, 2)).unwrap();
        let mlp = MlpVars {
            w1: g.input(Tensor::randn(2, 4, 1.0, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(8))).unwrap(),
            b1: g.input(Tensor::zeros(1, 4)).unwrap(),
            w2: g.input(Tensor::randn(4, 4, 1.0, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9))).unwrap(),
            b2: g.input(Tensor::zeros(1, 4)).unwrap(),
        };
        let q = sample_query(&mut g, h, &mlp, Pooling::Mean).unwrap();
        assert!(g.value(q).data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_neighbor_gets_full_attention_and_identical_embeddings_spread_uniformly() {
        // Path 0-1-2: node 0 has one neighbor; with identical embeddings
        // node 1 splits its mass evenly.
        let mut g = Graph::new();
        let h = g
            .input(Tensor::from_rows(&[vec![0.4, 0.4], vec![0.4, 0.4], vec![0.4, 0.4]]))
            .unwrap();
        let q = g.input(Tensor::from_rows(&[vec![0.3, -0.8]])).unwrap();
        let w = g.input(Tensor::from_rows(&[vec![0.5], vec![-0.25]])).unwrap();
        let mask = Tensor::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let (attn, _) = attention_coefficients(&mut g, h, q, w, &mask).unwrap();
        let a = g.value(attn);
        assert_eq!(a.get(0, 1), 1.0);
        assert!((a.get(1, 0) - 0.5).abs() < 1e-12);
        assert!((a.get(1, 2) - 0.5).abs() < 1e-12);
        assert_eq!(a.get(0, 0), 0.0);
    }
}

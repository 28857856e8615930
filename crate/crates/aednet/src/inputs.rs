use graph_core::{encode_features, LabelVocabulary, LabeledGraph, MatchPair};
use numerics::Tensor;

use crate::{ModelError, Result};

/// Per-pair tensors the forward pass consumes: encoded features, dense
/// neighborhood masks and isolated-node indicators for both graphs.
///
/// Attention masks exclude self-loops (self-information flows through the
/// residual connection instead). Rows of isolated nodes get a dummy
/// allowed entry so the masked softmax stays defined; their aggregated
/// messages are zeroed through the `nonisolated` indicators, so an
/// isolated node's layer output is `mlp(0) + residual`.
#[derive(Debug, Clone)]
pub struct PairInputs {
    pub query_features: Tensor,
    pub data_features: Tensor,
    pub query_mask: Tensor,
    pub data_mask: Tensor,
    pub query_nonisolated: Tensor,
    pub data_nonisolated: Tensor,
    pub query_size: usize,
    pub data_size: usize,
}

fn neighborhood_mask(g: &LabeledGraph) -> (Tensor, Tensor) {
    let n = g.num_nodes();
    let mut mask = Tensor::zeros(n, n);
    let mut nonisolated = Tensor::zeros(n, 1);
    for i in 0..n {
        if g.degree(i) == 0 {
            mask.set(i, 0, 1.0);
        } else {
            nonisolated.set(i, 0, 1.0);
            for &j in g.neighbors(i) {
                mask.set(i, j, 1.0);
            }
        }
    }
    (mask, nonisolated)
}

impl PairInputs {
    pub fn new(
        data: &LabeledGraph,
        query: &LabeledGraph,
        vocabulary: Option<&LabelVocabulary>,
        expected_input_dim: usize,
    ) -> Result<Self> {
        let qf = encode_features(query, vocabulary)?;
        let df = encode_features(data, vocabulary)?;
        if qf.cols != expected_input_dim || df.cols != expected_input_dim {
            return Err(ModelError::FeatureDim {
                expected: expected_input_dim,
                got: qf.cols.max(df.cols),
            });
        }
        let (query_mask, query_nonisolated) = neighborhood_mask(query);
        let (data_mask, data_nonisolated) = neighborhood_mask(data);
        Ok(PairInputs {
            query_features: Tensor::new(qf.rows, qf.cols, qf.values),
            data_features: Tensor::new(df.rows, df.cols, df.values),
            query_mask,
            data_mask,
            query_nonisolated,
            data_nonisolated,
            query_size: query.num_nodes(),
            data_size: data.num_nodes(),
        })
    }

    /// Replace both feature blocks (used for evaluation-time noise).
    pub fn with_features(mut self, query_features: Tensor, data_features: Tensor) -> Self {
        self.query_features = query_features;
        self.data_features = data_features;
        self
    }
}

/// Keep/delete split of a matched data node's first-order neighborhood:
/// a neighbor is kept when it is the image of a query neighbor of the
/// corresponding query node, deleted otherwise (it hangs off an extra
/// edge the query does not mirror).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionEntry {
    pub data_node: usize,
    pub keep: Vec<usize>,
    pub delete: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborPartition {
    pub entries: Vec<PartitionEntry>,
}

impl NeighborPartition {
    /// Build from one ground-truth mapping (query node `u` corresponds to
    /// data node `mapping[u]`).
    pub fn new(data: &LabeledGraph, query: &LabeledGraph, mapping: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(mapping.len());
        for (u, &v) in mapping.iter().enumerate() {
            let mut keep = Vec::new();
            for &ju in query.neighbors(u) {
                let jv = mapping[ju];
                if data.has_edge(v, jv) {
                    keep.push(jv);
                }
            }
            keep.sort_unstable();
            let delete: Vec<usize> = data
                .neighbors(v)
                .iter()
                .copied()
                .filter(|j| !keep.contains(j))
                .collect();
            entries.push(PartitionEntry {
                data_node: v,
                keep,
                delete,
            });
        }
        NeighborPartition { entries }
    }

    /// Partition of the canonically-first stored mapping of a pair.
    pub fn from_pair(pair: &MatchPair) -> Self {
        let mapping = pair.mappings()[0].assignment();
        NeighborPartition::new(pair.data_graph(), pair.query_graph(), mapping)
    }

    /// Total extra (delete) edges across matched nodes.
    pub fn num_delete_edges(&self) -> usize {
        self.entries.iter().map(|e| e.delete.len()).sum()
    }
}

/// Training-time constants derived from the ground truth: the matched /
/// unmatched column masks of the matching matrix, and the signed
/// keep/delete neighborhood matrix with the matched-node indicator.
#[derive(Debug, Clone)]
pub struct Supervision {
    pub matched: Tensor,
    pub unmatched: Tensor,
    /// |G| x |G|: +1 on kept neighbors, -1 on deleted neighbors of each
    /// matched node's row, 0 elsewhere.
    pub sign: Tensor,
    /// |G| x 1 indicator of matched data nodes.
    pub delta: Tensor,
    pub query_size: usize,
}

impl Supervision {
    pub fn new(pair: &MatchPair, partition: &NeighborPartition) -> Self {
        let q = pair.query_graph().num_nodes();
        let g = pair.data_graph().num_nodes();
        let matrix = pair.matrix();
        let mut matched = Tensor::zeros(q, g);
        let mut unmatched = Tensor::full(q, g, 1.0);
        for i in 0..q {
            for j in matrix.matched_columns(i) {
                matched.set(i, j, 1.0);
                unmatched.set(i, j, 0.0);
            }
        }

        let mut sign = Tensor::zeros(g, g);
        let mut delta = Tensor::zeros(g, 1);
        for entry in &partition.entries {
            delta.set(entry.data_node, 0, 1.0);
            for &j in &entry.keep {
                sign.set(entry.data_node, j, 1.0);
            }
            for &j in &entry.delete {
                sign.set(entry.data_node, j, -1.0);
            }
        }
        Supervision {
            matched,
            unmatched,
            sign,
            delta,
            query_size: q,
        }
    }

    pub fn from_pair(pair: &MatchPair) -> Self {
        Supervision::new(pair, &NeighborPartition::from_pair(pair))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use graph_core::Mapping;

    /// Triangle query {0,1,2} inside a 5-node graph where each matched
    /// node carries one extra edge.
    fn pair_with_extra_edges() -> MatchPair {
        let data = LabeledGraph::with_labels(
            5,
            &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 3)],
            vec![0, 1, 2, 0, 1],
        )
        .unwrap();
        let query = LabeledGraph::with_labels(3, &[(0, 1), (1, 2), (0, 2)], vec![0, 1, 2]).unwrap();
        let mapping = Mapping::new(vec![0, 1, 2]).unwrap();
        MatchPair::new(data, query, vec![mapping], false).unwrap()
    }

    #[test]
    fn partition_splits_neighbors_into_keep_and_delete() {
        let pair = pair_with_extra_edges();
        let partition = NeighborPartition::from_pair(&pair);
        assert_eq!(partition.entries.len(), 3);
        let by_node: Vec<(usize, &[usize], &[usize])> = partition
            .entries
            .iter()
            .map(|e| (e.data_node, e.keep.as_slice(), e.delete.as_slice()))
            .collect();
        assert_eq!(by_node[0], (0, &[1, 2][..], &[3][..]));
        assert_eq!(by_node[1], (1, &[0, 2][..], &[4][..]));
        assert_eq!(by_node[2], (2, &[0, 1][..], &[3][..]));
        assert_eq!(partition.num_delete_edges(), 3);
    }

    #[test]
    fn supervision_masks_are_complementary() {
        let pair = pair_with_extra_edges();
        let sup = Supervision::from_pair(&pair);
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(sup.matched.get(i, j) + sup.unmatched.get(i, j), 1.0);
            }
        }
        // Sign rows live only on matched nodes.
        for v in 0..5 {
            let row_nonzero = sup.sign.row(v).iter().any(|&x| x != 0.0);
            assert_eq!(row_nonzero, sup.delta.get(v, 0) == 1.0);
        }
    }

    #[test]
    fn isolated_nodes_get_dummy_mask_entries() {
        let g = LabeledGraph::unlabeled(3, &[(1, 2)]).unwrap();
        let (mask, nonisolated) = neighborhood_mask(&g);
        assert_eq!(mask.get(0, 0), 1.0); // dummy for isolated node 0
        assert_eq!(nonisolated.get(0, 0), 0.0);
        assert_eq!(nonisolated.get(1, 0), 1.0);
        assert_eq!(mask.get(1, 1), 0.0); // no self-loops for real rows
        assert_eq!(mask.get(1, 2), 1.0);
    }
}

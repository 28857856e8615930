use crate::{GraphError, LabeledGraph, Result};

/// Injective assignment of query nodes to data-graph nodes: query node `i`
/// maps to `assignment[i]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mapping {
    assignment: Vec<usize>,
}

impl Mapping {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let mut sorted = assignment.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::InvalidMapping(format!(
                "not injective: {assignment:?}"
            )));
        }
        Ok(Mapping { assignment })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Data node assigned to query node `i`.
    pub fn image_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub(crate) fn validate_for(&self, query_size: usize, data_size: usize) -> Result<()> {
        if self.assignment.len() != query_size {
            return Err(GraphError::InvalidMapping(format!(
                "mapping covers {} query nodes, expected {}",
                self.assignment.len(),
                query_size
            )));
        }
        if let Some(&j) = self.assignment.iter().find(|&&j| j >= data_size) {
            return Err(GraphError::InvalidMapping(format!(
                "mapped data node {j} out of range for {data_size} nodes"
            )));
        }
        Ok(())
    }
}

/// Binary |Q| x |G| matrix marking, for each query node, every data node
/// some stored mapping sends it to. Derived from a mapping set, never
/// stored independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingMatrix {
    query_size: usize,
    data_size: usize,
    entries: Vec<bool>,
}

impl MatchingMatrix {
    pub fn from_mappings(query_size: usize, data_size: usize, mappings: &[Mapping]) -> Result<Self> {
        if mappings.is_empty() {
            return Err(GraphError::InvalidPair(
                "matching matrix requires at least one mapping".into(),
            ));
        }
        let mut entries = vec![false; query_size * data_size];
        for m in mappings {
            m.validate_for(query_size, data_size)?;
            for (i, &j) in m.assignment().iter().enumerate() {
                entries[i * data_size + j] = true;
            }
        }
        Ok(MatchingMatrix {
            query_size,
            data_size,
            entries,
        })
    }

    pub fn query_size(&self) -> usize {
        self.query_size
    }

    pub fn data_size(&self) -> usize {
        self.data_size
    }

    pub fn is_match(&self, query_node: usize, data_node: usize) -> bool {
        self.entries[query_node * self.data_size + data_node]
    }

    pub fn matched_columns(&self, query_node: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.entries[query_node * self.data_size..(query_node + 1) * self.data_size];
        row.iter().enumerate().filter(|(_, &m)| m).map(|(j, _)| j)
    }
}

/// A supervised sample: data graph, query graph, the full (or capped) set of
/// ground-truth mappings, and the matrix derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    data_graph: LabeledGraph,
    query_graph: LabeledGraph,
    mappings: Vec<Mapping>,
    truncated: bool,
    matrix: MatchingMatrix,
}

impl MatchPair {
    /// Build a pair, validating mapping structure and deriving the matrix.
    /// `truncated` marks pairs whose mapping set was capped during
    /// generation and is therefore incomplete.
    pub fn new(
        data_graph: LabeledGraph,
        query_graph: LabeledGraph,
        mut mappings: Vec<Mapping>,
        truncated: bool,
    ) -> Result<Self> {
        if query_graph.feature_kind() != data_graph.feature_kind() {
            return Err(GraphError::InvalidPair(
                "query and data graphs carry different feature kinds".into(),
            ));
        }
        if query_graph.features().numerical_dim() != data_graph.features().numerical_dim() {
            return Err(GraphError::InvalidPair(
                "query and data graphs carry different feature dims".into(),
            ));
        }
        if query_graph.has_edge_labels() != data_graph.has_edge_labels() {
            return Err(GraphError::InvalidPair(
                "edge label presence differs between query and data graphs".into(),
            ));
        }
        mappings.sort_unstable();
        mappings.dedup();
        let matrix =
            MatchingMatrix::from_mappings(query_graph.num_nodes(), data_graph.num_nodes(), &mappings)?;
        Ok(MatchPair {
            data_graph,
            query_graph,
            mappings,
            truncated,
            matrix,
        })
    }

    pub fn data_graph(&self) -> &LabeledGraph {
        &self.data_graph
    }

    pub fn query_graph(&self) -> &LabeledGraph {
        &self.query_graph
    }

    /// Stored ground-truth mappings, sorted canonically.
    pub fn mappings(&self) -> &[Mapping] {
        &self.mappings
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn matrix(&self) -> &MatchingMatrix {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_rejects_duplicates() {
        assert!(Mapping::new(vec![0, 1, 2]).is_ok());
        assert!(Mapping::new(vec![0, 1, 0]).is_err());
    }

    #[test]
    fn matrix_is_union_of_mappings() {
        let m1 = Mapping::new(vec![0, 1]).unwrap();
        let m2 = Mapping::new(vec![2, 1]).unwrap();
        let matrix = MatchingMatrix::from_mappings(2, 3, &[m1, m2]).unwrap();
        assert!(matrix.is_match(0, 0) && matrix.is_match(0, 2) && matrix.is_match(1, 1));
        assert!(!matrix.is_match(0, 1) && !matrix.is_match(1, 0) && !matrix.is_match(1, 2));
        assert_eq!(matrix.matched_columns(0).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn empty_mapping_set_is_rejected() {
        assert!(MatchingMatrix::from_mappings(2, 3, &[]).is_err());
    }

    #[test]
    fn pair_requires_matching_feature_kinds() {
        let data = LabeledGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let query = LabeledGraph::with_labels(2, &[(0, 1)], vec![0, 1]).unwrap();
        let m = Mapping::new(vec![0, 1]).unwrap();
        assert!(MatchPair::new(data, query, vec![m], false).is_err());
    }
}

use std::collections::{HashMap, VecDeque};

use crate::{FeatureKind, GraphError, NodeFeatures, Result};

/// Undirected graph with node features and optional edge labels.
///
/// Edges are stored normalized as `(min, max)` pairs, sorted and unique;
/// adjacency lists are sorted ascending. Instances are immutable after
/// construction, so they can be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    features: NodeFeatures,
    edge_labels: Option<Vec<u32>>,
    edge_index: HashMap<(usize, usize), usize>,
}

impl LabeledGraph {
    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize)>,
        features: NodeFeatures,
        edge_labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        features.validate(num_nodes)?;
        if let Some(labels) = &edge_labels {
            if labels.len() != edges.len() {
                return Err(GraphError::InvalidGraph(format!(
                    "{} edge labels for {} edges",
                    labels.len(),
                    edges.len()
                )));
            }
        }

        // Normalize to (min, max) and sort edges and labels together.
        let mut normalized: Vec<((usize, usize), Option<u32>)> = Vec::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            if a >= num_nodes || b >= num_nodes {
                return Err(GraphError::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {num_nodes} nodes"
                )));
            }
            if a == b {
                return Err(GraphError::InvalidGraph(format!("self-loop at node {a}")));
            }
            let e = (a.min(b), a.max(b));
            normalized.push((e, edge_labels.as_ref().map(|l| l[idx])));
        }
        normalized.sort_unstable_by_key(|(e, _)| *e);
        for w in normalized.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    w[0].0 .0, w[0].0 .1
                )));
            }
        }

        let edges: Vec<(usize, usize)> = normalized.iter().map(|(e, _)| *e).collect();
        let edge_labels = if edge_labels.is_some() {
            Some(normalized.iter().map(|(_, l)| l.unwrap()).collect())
        } else {
            None
        };

        let mut neighbors = vec![Vec::new(); num_nodes];
        let mut edge_index = HashMap::with_capacity(edges.len());
        for (idx, &(a, b)) in edges.iter().enumerate() {
            neighbors[a].push(b);
            neighbors[b].push(a);
            edge_index.insert((a, b), idx);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }

        Ok(LabeledGraph {
            num_nodes,
            edges,
            neighbors,
            features,
            edge_labels,
            edge_index,
        })
    }

    /// Graph without node features or edge labels.
    pub fn unlabeled(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(num_nodes, edges.to_vec(), NodeFeatures::None, None)
    }

    /// Graph with categorical node labels and no edge labels.
    pub fn with_labels(num_nodes: usize, edges: &[(usize, usize)], labels: Vec<u32>) -> Result<Self> {
        Self::new(num_nodes, edges.to_vec(), NodeFeatures::Categorical(labels), None)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Normalized `(min, max)` edge list, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index.contains_key(&(a.min(b), a.max(b)))
    }

    pub fn edge_label(&self, a: usize, b: usize) -> Option<u32> {
        let labels = self.edge_labels.as_ref()?;
        self.edge_index
            .get(&(a.min(b), a.max(b)))
            .map(|&idx| labels[idx])
    }

    pub fn has_edge_labels(&self) -> bool {
        self.edge_labels.is_some()
    }

    pub fn edge_labels(&self) -> Option<&[u32]> {
        self.edge_labels.as_deref()
    }

    pub fn features(&self) -> &NodeFeatures {
        &self.features
    }

    pub fn feature_kind(&self) -> FeatureKind {
        self.features.kind()
    }

    /// True when node `u` of `self` and node `v` of `other` carry equal
    /// features. Differing feature kinds never compare equal.
    pub fn node_features_equal(&self, u: usize, other: &LabeledGraph, v: usize) -> bool {
        match (&self.features, &other.features) {
            (NodeFeatures::None, NodeFeatures::None) => true,
            (NodeFeatures::Categorical(a), NodeFeatures::Categorical(b)) => a[u] == b[v],
            (
                NodeFeatures::Numerical { dim: da, values: va },
                NodeFeatures::Numerical { dim: db, values: vb },
            ) => da == db && va[u * da..(u + 1) * da] == vb[v * db..(v + 1) * db],
            _ => false,
        }
    }

    /// Connected components as sorted node lists, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_nodes];
        let mut components = Vec::new();
        for start in 0..self.num_nodes {
            if seen[start] {
                continue;
            }
            let mut component = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        component.push(w);
                        queue.push_back(w);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes <= 1 || self.connected_components().len() == 1
    }

    /// Induced subgraph on `nodes`; new node `i` is `nodes[i]`. Keeps every
    /// edge with both endpoints selected, copying features and edge labels.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<LabeledGraph> {
        let mut local = HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            if v >= self.num_nodes {
                return Err(GraphError::InvalidGraph(format!(
                    "subgraph node {v} out of range"
                )));
            }
            if local.insert(v, i).is_some() {
                return Err(GraphError::InvalidGraph(format!(
                    "duplicate subgraph node {v}"
                )));
            }
        }

        let mut edges = Vec::new();
        let mut labels = self.edge_labels.as_ref().map(|_| Vec::new());
        for (idx, &(a, b)) in self.edges.iter().enumerate() {
            if let (Some(&la), Some(&lb)) = (local.get(&a), local.get(&b)) {
                edges.push((la, lb));
                if let Some(ls) = &mut labels {
                    ls.push(self.edge_labels.as_ref().unwrap()[idx]);
                }
            }
        }

        let features = match &self.features {
            NodeFeatures::None => NodeFeatures::None,
            NodeFeatures::Categorical(ls) => {
                NodeFeatures::Categorical(nodes.iter().map(|&v| ls[v]).collect())
            }
            NodeFeatures::Numerical { dim, values } => NodeFeatures::Numerical {
                dim: *dim,
                values: nodes
                    .iter()
                    .flat_map(|&v| values[v * dim..(v + 1) * dim].iter().copied())
                    .collect(),
            },
        };

        LabeledGraph::new(nodes.len(), edges, features, labels)
    }

    /// Relabel nodes: old node `i` becomes `perm[i]` in the result.
    pub fn permuted(&self, perm: &[usize]) -> Result<LabeledGraph> {
        if perm.len() != self.num_nodes {
            return Err(GraphError::InvalidGraph("permutation length mismatch".into()));
        }
        let mut seen = vec![false; self.num_nodes];
        for &p in perm {
            if p >= self.num_nodes || seen[p] {
                return Err(GraphError::InvalidGraph("not a permutation".into()));
            }
            seen[p] = true;
        }

        let mut inverse = vec![0; self.num_nodes];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }

        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let labels = self.edge_labels.clone();
        let features = match &self.features {
            NodeFeatures::None => NodeFeatures::None,
            NodeFeatures::Categorical(ls) => {
                NodeFeatures::Categorical((0..self.num_nodes).map(|j| ls[inverse[j]]).collect())
            }
            NodeFeatures::Numerical { dim, values } => NodeFeatures::Numerical {
                dim: *dim,
                values: (0..self.num_nodes)
                    .flat_map(|j| {
                        let old = inverse[j];
                        values[old * dim..(old + 1) * dim].iter().copied()
                    })
                    .collect(),
            },
        };
        LabeledGraph::new(self.num_nodes, edges, features, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_are_normalized_and_validated() {
        let g = LabeledGraph::unlabeled(3, &[(2, 0), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 1));
        assert!(!g.has_edge(0, 1));
        assert_eq!(g.neighbors(2), &[0, 1]);

        assert!(LabeledGraph::unlabeled(2, &[(0, 0)]).is_err());
        assert!(LabeledGraph::unlabeled(2, &[(0, 2)]).is_err());
        assert!(LabeledGraph::unlabeled(2, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges_and_features() {
        let g = LabeledGraph::with_labels(4, &[(0, 1), (1, 2), (2, 3), (0, 2)], vec![5, 6, 7, 8]).unwrap();
        let sub = g.induced_subgraph(&[2, 0, 1]).unwrap();
        assert_eq!(sub.num_nodes(), 3);
        // Selected {2,0,1}: internal edges (0,1),(1,2),(0,2) relabeled.
        assert_eq!(sub.num_edges(), 3);
        assert_eq!(
            g.features(),
            &NodeFeatures::Categorical(vec![5, 6, 7, 8])
        );
        assert_eq!(sub.features(), &NodeFeatures::Categorical(vec![7, 5, 6]));
    }

    #[test]
    fn connectivity_checks() {
        let g = LabeledGraph::unlabeled(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.connected_components(), vec![vec![0, 1], vec![2, 3]]);
        let h = LabeledGraph::unlabeled(1, &[]).unwrap();
        assert!(h.is_connected());
    }

    #[test]
    fn permutation_relabels_consistently() {
        let g = LabeledGraph::with_labels(3, &[(0, 1)], vec![10, 20, 30]).unwrap();
        let p = g.permuted(&[2, 0, 1]).unwrap();
        // Old edge (0,1) becomes (2,0); old labels follow their nodes.
        assert!(p.has_edge(0, 2));
        assert_eq!(p.features(), &NodeFeatures::Categorical(vec![20, 30, 10]));
    }
}

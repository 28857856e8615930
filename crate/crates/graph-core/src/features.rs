use std::collections::BTreeMap;

use crate::{GraphError, LabeledGraph, Result};

/// Per-node features of a graph. All nodes of one graph share a single kind.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeFeatures {
    /// No node features; the model sees structure only.
    None,
    /// One label id per node.
    Categorical(Vec<u32>),
    /// One real vector per node, row-major, all rows of width `dim`.
    Numerical { dim: usize, values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    None,
    Categorical,
    Numerical,
}

impl NodeFeatures {
    pub fn kind(&self) -> FeatureKind {
        match self {
            NodeFeatures::None => FeatureKind::None,
            NodeFeatures::Categorical(_) => FeatureKind::Categorical,
            NodeFeatures::Numerical { .. } => FeatureKind::Numerical,
        }
    }

    /// Width of the numerical feature rows, if this is the numerical kind.
    pub fn numerical_dim(&self) -> Option<usize> {
        match self {
            NodeFeatures::Numerical { dim, .. } => Some(*dim),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, num_nodes: usize) -> Result<()> {
        match self {
            NodeFeatures::None => Ok(()),
            NodeFeatures::Categorical(labels) => {
                if labels.len() != num_nodes {
                    return Err(GraphError::InvalidGraph(format!(
                        "{} node labels for {} nodes",
                        labels.len(),
                        num_nodes
                    )));
                }
                Ok(())
            }
            NodeFeatures::Numerical { dim, values } => {
                if *dim == 0 {
                    return Err(GraphError::InvalidGraph(
                        "numerical features must have dim >= 1".into(),
                    ));
                }
                if values.len() != num_nodes * dim {
                    return Err(GraphError::InvalidGraph(format!(
                        "{} feature values for {} nodes of dim {}",
                        values.len(),
                        num_nodes,
                        dim
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(GraphError::InvalidGraph(
                        "non-finite numerical feature".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Dense row-major real matrix produced by feature encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }
}

/// Dense label-to-index map shared across a corpus of categorical graphs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelVocabulary {
    map: BTreeMap<u32, usize>,
}

impl LabelVocabulary {
    /// Collect every label present in the given graphs, assigning dense
    /// indices in ascending label order.
    pub fn from_graphs<'a>(graphs: impl IntoIterator<Item = &'a LabeledGraph>) -> Self {
        let mut labels: Vec<u32> = Vec::new();
        for g in graphs {
            if let NodeFeatures::Categorical(ls) = g.features() {
                labels.extend_from_slice(ls);
            }
        }
        labels.sort_unstable();
        labels.dedup();
        let map = labels.into_iter().enumerate().map(|(i, l)| (l, i)).collect();
        LabelVocabulary { map }
    }

    pub fn from_labels(labels: impl IntoIterator<Item = u32>) -> Self {
        let mut labels: Vec<u32> = labels.into_iter().collect();
        labels.sort_unstable();
        labels.dedup();
        let map = labels.into_iter().enumerate().map(|(i, l)| (l, i)).collect();
        LabelVocabulary { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.map.get(&label).copied()
    }

    /// Labels in index order.
    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }
}

/// Encode a graph's node features as a dense real matrix.
///
/// Categorical labels become one-hot rows over `vocabulary`, numerical rows
/// are copied verbatim, and featureless nodes get a single constant 1.0
/// column so a structure-only graph still has a nonzero input.
pub fn encode_features(g: &LabeledGraph, vocabulary: Option<&LabelVocabulary>) -> Result<FeatureMatrix> {
    let n = g.num_nodes();
    match g.features() {
        NodeFeatures::None => Ok(FeatureMatrix {
            rows: n,
            cols: 1,
            values: vec![1.0; n],
        }),
        NodeFeatures::Categorical(labels) => {
            let vocab = vocabulary.ok_or_else(|| {
                GraphError::Encoding("categorical graph requires a vocabulary".into())
            })?;
            let cols = vocab.len();
            let mut values = vec![0.0; n * cols];
            for (i, &label) in labels.iter().enumerate() {
                let j = vocab.index_of(label).ok_or(GraphError::UnknownLabel(label))?;
                values[i * cols + j] = 1.0;
            }
            Ok(FeatureMatrix { rows: n, cols, values })
        }
        NodeFeatures::Numerical { dim, values } => Ok(FeatureMatrix {
            rows: n,
            cols: *dim,
            values: values.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn none_features_encode_as_constant_column() {
        let g = LabeledGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let m = encode_features(&g, None).unwrap();
        assert_eq!((m.rows, m.cols), (3, 1));
        assert_eq!(m.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn categorical_features_encode_one_hot() {
        let g = LabeledGraph::with_labels(2, &[(0, 1)], vec![0, 2]).unwrap();
        let vocab = LabelVocabulary::from_labels([0, 1, 2]);
        let m = encode_features(&g, Some(&vocab)).unwrap();
        assert_eq!((m.rows, m.cols), (2, 3));
        assert_eq!(m.row(0), &[1.0, 0.0, 0.0]);
        assert_eq!(m.row(1), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn numerical_features_copy_verbatim() {
        let g = LabeledGraph::new(
            1,
            vec![],
            NodeFeatures::Numerical {
                dim: 2,
                values: vec![0.5, 1.0],
            },
            None,
        )
        .unwrap();
        let m = encode_features(&g, None).unwrap();
        assert_eq!((m.rows, m.cols), (1, 2));
        assert_eq!(m.values, vec![0.5, 1.0]);
    }

    #[test]
    fn missing_label_is_an_error() {
        let g = LabeledGraph::with_labels(1, &[], vec![7]).unwrap();
        let vocab = LabelVocabulary::from_labels([0, 1]);
        assert!(matches!(
            encode_features(&g, Some(&vocab)),
            Err(GraphError::UnknownLabel(7))
        ));
    }
}

//! Exact induced-subgraph-isomorphism enumeration.
//!
//! [`enumerate_mappings`] is a backtracking search with feasibility pruning
//! (connected candidate ordering, feature and degree filters, immediate
//! edge/non-edge checks). [`brute_force_mappings`] enumerates every
//! injection and filters it, serving as the independent oracle the search
//! is tested against.

mod brute;
mod search;

pub use brute::brute_force_mappings;
pub use search::{enumerate_mappings, MatchMode, MatchOptions, MatchOutcome, SearchStats};

use graph_core::LabeledGraph;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("query graph must have at least one node")]
    EmptyQuery,

    #[error("query and data graphs carry different node feature kinds")]
    FeatureKindMismatch,

    #[error("edge label presence differs between query and data graphs")]
    EdgeLabelPresenceMismatch,

    #[error("brute-force enumeration is limited to data graphs of at most {limit} nodes, got {got}")]
    BruteForceTooLarge { limit: usize, got: usize },
}

pub(crate) fn check_compatible(data: &LabeledGraph, query: &LabeledGraph) -> Result<(), MatchError> {
    if query.num_nodes() == 0 {
        return Err(MatchError::EmptyQuery);
    }
    if query.feature_kind() != data.feature_kind()
        || query.features().numerical_dim() != data.features().numerical_dim()
    {
        return Err(MatchError::FeatureKindMismatch);
    }
    if query.has_edge_labels() != data.has_edge_labels() {
        return Err(MatchError::EdgeLabelPresenceMismatch);
    }
    Ok(())
}

/// Check one complete assignment against the matching conditions: feature
/// equality, query edges present in the data graph with equal edge labels,
/// and (under `induced`) query non-edges absent from the data graph.
pub fn is_valid_mapping(
    data: &LabeledGraph,
    query: &LabeledGraph,
    assignment: &[usize],
    induced: bool,
) -> bool {
    for (u, &v) in assignment.iter().enumerate() {
        if !query.node_features_equal(u, data, v) {
            return false;
        }
    }
    for ua in 0..query.num_nodes() {
        for ub in (ua + 1)..query.num_nodes() {
            let (va, vb) = (assignment[ua], assignment[ub]);
            if query.has_edge(ua, ub) {
                if !data.has_edge(va, vb) {
                    return false;
                }
                if query.edge_label(ua, ub) != data.edge_label(va, vb) {
                    return false;
                }
            } else if induced && data.has_edge(va, vb) {
                return false;
            }
        }
    }
    true
}

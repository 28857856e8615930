use graph_core::{LabeledGraph, Mapping};

use crate::{check_compatible, is_valid_mapping, MatchError};

const BRUTE_FORCE_NODE_LIMIT: usize = 10;

/// Enumerate every injection from the query into the data graph and keep
/// the valid induced matches, sorted canonically. Independent of the
/// backtracking search; guarded against factorial blow-up.
pub fn brute_force_mappings(
    data: &LabeledGraph,
    query: &LabeledGraph,
) -> Result<Vec<Mapping>, MatchError> {
    check_compatible(data, query)?;
    if data.num_nodes() > BRUTE_FORCE_NODE_LIMIT {
        return Err(MatchError::BruteForceTooLarge {
            limit: BRUTE_FORCE_NODE_LIMIT,
            got: data.num_nodes(),
        });
    }

    let mut results = Vec::new();
    let mut assignment = Vec::with_capacity(query.num_nodes());
    let mut used = vec![false; data.num_nodes()];
    enumerate_injections(data, query, &mut assignment, &mut used, &mut results);
    results.sort_unstable();
    Ok(results)
}

fn enumerate_injections(
    data: &LabeledGraph,
    query: &LabeledGraph,
    assignment: &mut Vec<usize>,
    used: &mut [bool],
    results: &mut Vec<Mapping>,
) {
    if assignment.len() == query.num_nodes() {
        if is_valid_mapping(data, query, assignment, true) {
            results.push(Mapping::new(assignment.clone()).expect("injective by construction"));
        }
        return;
    }
    for v in 0..data.num_nodes() {
        if used[v] {
            continue;
        }
        used[v] = true;
        assignment.push(v);
        enumerate_injections(data, query, assignment, used, results);
        assignment.pop();
        used[v] = false;
    }
}

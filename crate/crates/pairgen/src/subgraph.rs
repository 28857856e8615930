use graph_core::{LabeledGraph, Mapping};
use rand::Rng;

use crate::GenError;

/// Extract a uniform-start, frontier-grown connected induced subgraph of
/// `size` nodes. Returns the query graph and the extraction mapping
/// (query node `i` corresponds to data node `mapping.image_of(i)`).
///
/// Growth picks a uniform random node from the current frontier (the set
/// of unselected neighbors of the selected set) until `size` nodes are
/// chosen, then takes the induced subgraph on them, so the query is
/// connected by construction and always an induced match.
pub fn sample_connected_subgraph(
    g: &LabeledGraph,
    size: usize,
    rng: &mut impl Rng,
) -> Result<(LabeledGraph, Mapping), GenError> {
    if size == 0 || size > g.num_nodes() {
        return Err(GenError::InvalidConfig(format!(
            "subgraph size {size} out of range for a {}-node graph",
            g.num_nodes()
        )));
    }

    // Start anywhere inside a component large enough to finish the walk.
    let components = g.connected_components();
    let eligible: Vec<usize> = components
        .iter()
        .filter(|c| c.len() >= size)
        .flat_map(|c| c.iter().copied())
        .collect();
    if eligible.is_empty() {
        return Err(GenError::NoComponentLargeEnough(size));
    }
    let start = eligible[rng.gen_range(0..eligible.len())];

    let mut selected = Vec::with_capacity(size);
    let mut in_selected = vec![false; g.num_nodes()];
    let mut frontier: Vec<usize> = Vec::new();
    let mut in_frontier = vec![false; g.num_nodes()];

    selected.push(start);
    in_selected[start] = true;
    for &w in g.neighbors(start) {
        frontier.push(w);
        in_frontier[w] = true;
    }

    while selected.len() < size {
        let pick = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(pick);
        in_frontier[v] = false;
        selected.push(v);
        in_selected[v] = true;
        for &w in g.neighbors(v) {
            if !in_selected[w] && !in_frontier[w] {
                frontier.push(w);
                in_frontier[w] = true;
            }
        }
    }

    let query = g.induced_subgraph(&selected)?;
    let mapping = Mapping::new(selected).expect("selected nodes are distinct");
    Ok((query, mapping))
}

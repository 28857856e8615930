use std::time::{Duration, Instant};

use graph_core::{LabeledGraph, Mapping};

use crate::{check_compatible, MatchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Enumerate the complete mapping set.
    #[default]
    All,
    /// Stop at the first mapping found.
    First,
    /// Report only whether any mapping exists.
    Exists,
}

#[derive(Debug, Clone, Default)]
pub struct MatchOptions {
    pub mode: MatchMode,
    /// Cap on the number of recorded mappings; exceeding it flags the
    /// outcome as truncated.
    pub limit: Option<usize>,
    /// Wall-clock budget; exceeding it flags the outcome as timed out and
    /// returns the partial results.
    pub deadline: Option<Duration>,
    /// When false, query non-edges are not required to be absent from the
    /// data graph. Defaults to induced semantics.
    pub non_induced: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Number of backtracking calls (partial assignments visited).
    pub recursion_calls: u64,
    /// Number of candidate data nodes examined across all calls.
    pub candidates_tried: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct MatchOutcome {
    /// Recorded mappings; empty in `Exists` mode.
    pub mappings: Vec<Mapping>,
    /// Whether at least one mapping exists (meaningful in every mode).
    pub found: bool,
    /// The limit cut enumeration short: more mappings exist than returned.
    pub truncated: bool,
    /// The deadline cut enumeration short; results are partial.
    pub timed_out: bool,
    pub stats: SearchStats,
}

/// Enumerate induced subgraph matches of `query` into `data`.
///
/// The query is expanded in a connected order (each next node adjacent to
/// an already-mapped one, preferring the most constrained node); candidates
/// are data nodes with equal features and sufficient degree, consistent
/// with every mapped neighbor, tried in ascending index order so results
/// and `First` are reproducible. Disconnected queries are tolerated but
/// fall back to scanning all unmapped data nodes for anchorless components.
pub fn enumerate_mappings(
    data: &LabeledGraph,
    query: &LabeledGraph,
    options: &MatchOptions,
) -> Result<MatchOutcome, MatchError> {
    check_compatible(data, query)?;
    let start = Instant::now();
    let order = expansion_order(query);

    let mut search = Search {
        data,
        query,
        order: &order,
        options,
        start,
        assignment: vec![usize::MAX; query.num_nodes()],
        used: vec![false; data.num_nodes()],
        outcome: MatchOutcome {
            mappings: Vec::new(),
            found: false,
            truncated: false,
            timed_out: false,
            stats: SearchStats::default(),
        },
    };
    if query.num_nodes() <= data.num_nodes() {
        search.recurse(0);
    }
    let mut outcome = search.outcome;
    outcome.stats.wall_time = start.elapsed();
    outcome.mappings.sort_unstable();
    Ok(outcome)
}

/// Connected expansion order: start at node 0, then repeatedly take the
/// unordered node with the most already-ordered neighbors (smallest index
/// on ties). Nodes in components not yet reached are appended by index.
fn expansion_order(query: &LabeledGraph) -> Vec<usize> {
    let n = query.num_nodes();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let mut ordered_neighbors = vec![0usize; n];

    order.push(0);
    placed[0] = true;
    for &w in query.neighbors(0) {
        ordered_neighbors[w] += 1;
    }

    while order.len() < n {
        let mut best: Option<usize> = None;
        for u in 0..n {
            if placed[u] || ordered_neighbors[u] == 0 {
                continue;
            }
            match best {
                Some(b) if ordered_neighbors[u] <= ordered_neighbors[b] => {}
                _ => best = Some(u),
            }
        }
        // Disconnected query: open a new component at the smallest index.
        let next = best.unwrap_or_else(|| (0..n).find(|&u| !placed[u]).unwrap());
        order.push(next);
        placed[next] = true;
        for &w in query.neighbors(next) {
            ordered_neighbors[w] += 1;
        }
    }
    order
}

struct Search<'a> {
    data: &'a LabeledGraph,
    query: &'a LabeledGraph,
    order: &'a [usize],
    options: &'a MatchOptions,
    start: Instant,
    assignment: Vec<usize>,
    used: Vec<bool>,
    outcome: MatchOutcome,
}

enum Flow {
    Continue,
    Stop,
}

impl Search<'_> {
    fn recurse(&mut self, depth: usize) -> Flow {
        self.outcome.stats.recursion_calls += 1;
        if let Some(deadline) = self.options.deadline {
            if self.start.elapsed() >= deadline {
                self.outcome.timed_out = true;
                return Flow::Stop;
            }
        }
        if depth == self.order.len() {
            return self.record();
        }

        let u = self.order[depth];
        // Anchor candidates at the image of a mapped query neighbor when
        // one exists; otherwise scan all data nodes.
        let anchor = self
            .query
            .neighbors(u)
            .iter()
            .find(|&&w| self.assignment[w] != usize::MAX)
            .map(|&w| self.assignment[w]);

        let data = self.data;
        match anchor {
            Some(v) => {
                for &c in data.neighbors(v) {
                    if let Flow::Stop = self.try_candidate(depth, u, c) {
                        return Flow::Stop;
                    }
                }
            }
            None => {
                for c in 0..data.num_nodes() {
                    if let Flow::Stop = self.try_candidate(depth, u, c) {
                        return Flow::Stop;
                    }
                }
            }
        }
        Flow::Continue
    }

    fn try_candidate(&mut self, depth: usize, u: usize, v: usize) -> Flow {
        self.outcome.stats.candidates_tried += 1;
        if self.used[v] || !self.feasible(u, v) {
            return Flow::Continue;
        }
        self.assignment[u] = v;
        self.used[v] = true;
        let flow = self.recurse(depth + 1);
        self.assignment[u] = usize::MAX;
        self.used[v] = false;
        flow
    }

    fn feasible(&self, u: usize, v: usize) -> bool {
        if !self.query.node_features_equal(u, self.data, v) {
            return false;
        }
        // A data node with fewer neighbors than the query node cannot host
        // all of its query edges (mapped images are distinct).
        if self.data.degree(v) < self.query.degree(u) {
            return false;
        }
        for w in 0..self.query.num_nodes() {
            let image = self.assignment[w];
            if image == usize::MAX {
                continue;
            }
            if self.query.has_edge(u, w) {
                if !self.data.has_edge(v, image) {
                    return false;
                }
                if self.query.edge_label(u, w) != self.data.edge_label(v, image) {
                    return false;
                }
            } else if !self.options.non_induced && self.data.has_edge(v, image) {
                return false;
            }
        }
        true
    }

    fn record(&mut self) -> Flow {
        self.outcome.found = true;
        match self.options.mode {
            MatchMode::Exists => return Flow::Stop,
            MatchMode::First => {
                self.outcome.mappings.push(self.current_mapping());
                return Flow::Stop;
            }
            MatchMode::All => {
                if let Some(limit) = self.options.limit {
                    if self.outcome.mappings.len() >= limit {
                        self.outcome.truncated = true;
                        return Flow::Stop;
                    }
                }
                self.outcome.mappings.push(self.current_mapping());
            }
        }
        Flow::Continue
    }

    fn current_mapping(&self) -> Mapping {
        Mapping::new(self.assignment.clone()).expect("search keeps assignments injective")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> LabeledGraph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        LabeledGraph::unlabeled(n, &edges).unwrap()
    }

    #[test]
    fn triangle_into_k4_has_24_mappings() {
        let outcome = enumerate_mappings(&k(4), &k(3), &MatchOptions::default()).unwrap();
        assert_eq!(outcome.mappings.len(), 24);
        assert!(outcome.found && !outcome.truncated && !outcome.timed_out);
    }

    #[test]
    fn path_into_triangle_has_no_induced_match() {
        let path = LabeledGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let outcome = enumerate_mappings(&k(3), &path, &MatchOptions::default()).unwrap();
        assert!(outcome.mappings.is_empty());
        assert!(!outcome.found);

        // Without the induced requirement the path embeds freely.
        let relaxed = MatchOptions {
            non_induced: true,
            ..Default::default()
        };
        let outcome = enumerate_mappings(&k(3), &path, &relaxed).unwrap();
        assert_eq!(outcome.mappings.len(), 6);
    }

    #[test]
    fn first_mode_is_deterministic_and_member_of_all() {
        let data = k(5);
        let query = k(3);
        let all = enumerate_mappings(&data, &query, &MatchOptions::default()).unwrap();
        let first = enumerate_mappings(
            &data,
            &query,
            &MatchOptions {
                mode: MatchMode::First,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(first.mappings.len(), 1);
        assert!(all.mappings.contains(&first.mappings[0]));

        let again = enumerate_mappings(
            &data,
            &query,
            &MatchOptions {
                mode: MatchMode::First,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(first.mappings, again.mappings);
    }

    #[test]
    fn exists_mode_returns_no_mappings() {
        let outcome = enumerate_mappings(
            &k(4),
            &k(3),
            &MatchOptions {
                mode: MatchMode::Exists,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(outcome.found);
        assert!(outcome.mappings.is_empty());
    }

    #[test]
    fn limit_flags_truncation_only_when_exceeded() {
        let capped = enumerate_mappings(
            &k(4),
            &k(3),
            &MatchOptions {
                limit: Some(10),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(capped.mappings.len(), 10);
        assert!(capped.truncated);

        let exact = enumerate_mappings(
            &k(4),
            &k(3),
            &MatchOptions {
                limit: Some(24),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(exact.mappings.len(), 24);
        assert!(!exact.truncated);
    }

    #[test]
    fn zero_deadline_times_out() {
        let outcome = enumerate_mappings(
            &k(6),
            &k(3),
            &MatchOptions {
                deadline: Some(Duration::ZERO),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(outcome.timed_out);
    }

    #[test]
    fn disconnected_query_is_tolerated() {
        // Two isolated query nodes into a path: any ordered pair of
        // distinct non-adjacent data nodes.
        let data = LabeledGraph::unlabeled(3, &[(0, 1), (1, 2)]).unwrap();
        let query = LabeledGraph::unlabeled(2, &[]).unwrap();
        let outcome = enumerate_mappings(&data, &query, &MatchOptions::default()).unwrap();
        let got: Vec<&[usize]> = outcome.mappings.iter().map(|m| m.assignment()).collect();
        assert_eq!(got, vec![&[0, 2][..], &[2, 0][..]]);
    }

    #[test]
    fn edge_labels_must_agree() {
        let data = LabeledGraph::new(
            3,
            vec![(0, 1), (1, 2)],
            graph_core::NodeFeatures::None,
            Some(vec![7, 8]),
        )
        .unwrap();
        let query = LabeledGraph::new(
            2,
            vec![(0, 1)],
            graph_core::NodeFeatures::None,
            Some(vec![8]),
        )
        .unwrap();
        let outcome = enumerate_mappings(&data, &query, &MatchOptions::default()).unwrap();
        let got: Vec<&[usize]> = outcome.mappings.iter().map(|m| m.assignment()).collect();
        // Only the label-8 edge (1, 2) hosts the query edge.
        assert_eq!(got, vec![&[1, 2][..], &[2, 1][..]]);
    }

    #[test]
    fn query_larger_than_data_finds_nothing() {
        let outcome = enumerate_mappings(&k(2), &k(3), &MatchOptions::default()).unwrap();
        assert!(!outcome.found);
    }
}

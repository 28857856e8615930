use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::{GraphError, LabeledGraph, NodeFeatures, Result};

/// Load a directory in the conventional multi-file plain-text dataset layout:
/// `<DS>_A.txt` (comma-separated 1-indexed global edge list),
/// `<DS>_graph_indicator.txt` (graph id per global node), at most one of
/// `<DS>_node_labels.txt` / `<DS>_node_attributes.txt`, and optionally
/// `<DS>_edge_labels.txt`.
///
/// Returns one graph per graph id, ascending, with node indices localized
/// and 0-based and undirected edges deduplicated.
pub fn load_tudataset(directory: &Path) -> Result<Vec<LabeledGraph>> {
    let prefix = find_prefix(directory)?;
    let file = |suffix: &str| directory.join(format!("{prefix}_{suffix}.txt"));

    let indicator_path = file("graph_indicator");
    if !indicator_path.exists() {
        return Err(GraphError::MissingFile(
            indicator_path.to_string_lossy().into_owned(),
        ));
    }
    let indicator = read_lines(&indicator_path)?;
    let graph_of_node: Vec<u64> = indicator
        .iter()
        .enumerate()
        .map(|(i, line)| parse_one::<u64>(&indicator_path, i + 1, line))
        .collect::<Result<_>>()?;
    let total_nodes = graph_of_node.len();

    let a_path = file("A");
    let edge_rows = read_lines(&a_path)?;
    let mut global_edges = Vec::with_capacity(edge_rows.len());
    for (i, line) in edge_rows.iter().enumerate() {
        let fields = split_fields(line);
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                path: a_path.clone(),
                line: i + 1,
                message: format!("expected 2 comma-separated node ids, got {}", fields.len()),
            });
        }
        let u: usize = parse_one(&a_path, i + 1, fields[0])?;
        let v: usize = parse_one(&a_path, i + 1, fields[1])?;
        if u == 0 || v == 0 || u > total_nodes || v > total_nodes {
            return Err(GraphError::Parse {
                path: a_path.clone(),
                line: i + 1,
                message: format!("edge ({u}, {v}) references a node outside 1..={total_nodes}"),
            });
        }
        global_edges.push((u - 1, v - 1));
    }

    let labels_path = file("node_labels");
    let attrs_path = file("node_attributes");
    if labels_path.exists() && attrs_path.exists() {
        return Err(GraphError::Encoding(format!(
            "{} provides both node labels and node attributes; at most one is supported",
            directory.display()
        )));
    }

    let node_labels: Option<Vec<u32>> = if labels_path.exists() {
        let lines = read_lines(&labels_path)?;
        check_length(&labels_path, lines.len(), total_nodes)?;
        Some(
            lines
                .iter()
                .enumerate()
                .map(|(i, line)| parse_one::<u32>(&labels_path, i + 1, line))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    let node_attrs: Option<(usize, Vec<Vec<f64>>)> = if attrs_path.exists() {
        let lines = read_lines(&attrs_path)?;
        check_length(&attrs_path, lines.len(), total_nodes)?;
        let mut rows = Vec::with_capacity(lines.len());
        let mut dim = None;
        for (i, line) in lines.iter().enumerate() {
            let row: Vec<f64> = split_fields(line)
                .iter()
                .map(|f| parse_one::<f64>(&attrs_path, i + 1, f))
                .collect::<Result<_>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(GraphError::Parse {
                        path: attrs_path.clone(),
                        line: i + 1,
                        message: format!("ragged attribute row: {} values, expected {d}", row.len()),
                    });
                }
                _ => {}
            }
            rows.push(row);
        }
        Some((dim.unwrap_or(0), rows))
    } else {
        None
    };

    let edge_labels_path = file("edge_labels");
    let edge_labels: Option<Vec<u32>> = if edge_labels_path.exists() {
        let lines = read_lines(&edge_labels_path)?;
        check_length(&edge_labels_path, lines.len(), global_edges.len())?;
        Some(
            lines
                .iter()
                .enumerate()
                .map(|(i, line)| parse_one::<u32>(&edge_labels_path, i + 1, line))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };

    // Group nodes by graph id; local index = rank of the global id within
    // its graph.
    let mut nodes_per_graph: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (node, &gid) in graph_of_node.iter().enumerate() {
        nodes_per_graph.entry(gid).or_default().push(node);
    }
    let mut local_index = vec![0usize; total_nodes];
    for nodes in nodes_per_graph.values() {
        for (local, &global) in nodes.iter().enumerate() {
            local_index[global] = local;
        }
    }

    // Distribute edges; dedupe the two directions, requiring consistent labels.
    let mut edges_per_graph: BTreeMap<u64, BTreeMap<(usize, usize), Option<u32>>> = BTreeMap::new();
    for (row, &(u, v)) in global_edges.iter().enumerate() {
        let gu = graph_of_node[u];
        let gv = graph_of_node[v];
        if gu != gv {
            return Err(GraphError::Parse {
                path: a_path.clone(),
                line: row + 1,
                message: format!(
                    "edge ({}, {}) crosses graphs {gu} and {gv}",
                    u + 1,
                    v + 1
                ),
            });
        }
        let (a, b) = (local_index[u], local_index[v]);
        let key = (a.min(b), a.max(b));
        let label = edge_labels.as_ref().map(|ls| ls[row]);
        let slot = edges_per_graph.entry(gu).or_default().entry(key).or_insert(label);
        if *slot != label {
            return Err(GraphError::Parse {
                path: a_path.clone(),
                line: row + 1,
                message: format!("conflicting labels for edge ({}, {})", u + 1, v + 1),
            });
        }
    }

    let mut graphs = Vec::with_capacity(nodes_per_graph.len());
    for (gid, nodes) in &nodes_per_graph {
        let edge_map = edges_per_graph.remove(gid).unwrap_or_default();
        let edges: Vec<(usize, usize)> = edge_map.keys().copied().collect();
        let labels: Option<Vec<u32>> = if edge_labels.is_some() {
            Some(edge_map.values().map(|l| l.unwrap()).collect())
        } else {
            None
        };
        let features = if let Some(ls) = &node_labels {
            NodeFeatures::Categorical(nodes.iter().map(|&n| ls[n]).collect())
        } else if let Some((dim, rows)) = &node_attrs {
            NodeFeatures::Numerical {
                dim: *dim,
                values: nodes.iter().flat_map(|&n| rows[n].iter().copied()).collect(),
            }
        } else {
            NodeFeatures::None
        };
        graphs.push(LabeledGraph::new(nodes.len(), edges, features, labels)?);
    }
    Ok(graphs)
}

fn find_prefix(directory: &Path) -> Result<String> {
    let entries = fs::read_dir(directory).map_err(|e| GraphError::io(directory, e))?;
    let mut prefixes = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| GraphError::io(directory, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(prefix) = name.strip_suffix("_A.txt") {
            prefixes.push(prefix.to_string());
        }
    }
    match prefixes.len() {
        0 => Err(GraphError::MissingFile(format!(
            "{}: no *_A.txt edge list found",
            directory.display()
        ))),
        1 => Ok(prefixes.pop().unwrap()),
        _ => {
            prefixes.sort();
            Err(GraphError::Encoding(format!(
                "{}: multiple datasets present ({})",
                directory.display(),
                prefixes.join(", ")
            )))
        }
    }
}

fn read_lines(path: &PathBuf) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| GraphError::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_one<T: std::str::FromStr>(path: &PathBuf, line: usize, field: &str) -> Result<T> {
    field.trim().parse().map_err(|_| GraphError::Parse {
        path: path.clone(),
        line,
        message: format!("cannot parse {field:?}"),
    })
}

fn check_length(path: &PathBuf, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(GraphError::Parse {
            path: path.clone(),
            line: got.min(expected) + 1,
            message: format!("{got} lines, expected {expected}"),
        });
    }
    Ok(())
}

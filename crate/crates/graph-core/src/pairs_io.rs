//! Line-delimited pair interchange format: one JSON record per line holding
//! both graphs, the mapping list and the truncation flag. The matching
//! matrix is re-derived on read, never stored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{GraphError, LabeledGraph, MatchPair, Mapping, NodeFeatures, Result};

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FeatureRecord {
    None,
    Categorical { labels: Vec<u32> },
    Numerical { dim: usize, values: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    features: FeatureRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edge_labels: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    data: GraphRecord,
    query: GraphRecord,
    mappings: Vec<Vec<usize>>,
    #[serde(default)]
    truncated: bool,
}

fn graph_to_record(g: &LabeledGraph) -> GraphRecord {
    let features = match g.features() {
        NodeFeatures::None => FeatureRecord::None,
        NodeFeatures::Categorical(labels) => FeatureRecord::Categorical {
            labels: labels.clone(),
        },
        NodeFeatures::Numerical { dim, values } => FeatureRecord::Numerical {
            dim: *dim,
            values: values.clone(),
        },
    };
    GraphRecord {
        num_nodes: g.num_nodes(),
        edges: g.edges().to_vec(),
        features,
        edge_labels: g.edge_labels().map(<[u32]>::to_vec),
    }
}

fn record_to_graph(r: GraphRecord) -> Result<LabeledGraph> {
    let features = match r.features {
        FeatureRecord::None => NodeFeatures::None,
        FeatureRecord::Categorical { labels } => NodeFeatures::Categorical(labels),
        FeatureRecord::Numerical { dim, values } => NodeFeatures::Numerical { dim, values },
    };
    LabeledGraph::new(r.num_nodes, r.edges, features, r.edge_labels)
}

pub fn write_pairs(path: &Path, pairs: &[MatchPair]) -> Result<()> {
    let file = File::create(path).map_err(|e| GraphError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for pair in pairs {
        let record = PairRecord {
            data: graph_to_record(pair.data_graph()),
            query: graph_to_record(pair.query_graph()),
            mappings: pair
                .mappings()
                .iter()
                .map(|m| m.assignment().to_vec())
                .collect(),
            truncated: pair.is_truncated(),
        };
        let line = serde_json::to_string(&record)
            .map_err(|e| GraphError::Encoding(format!("cannot serialize pair: {e}")))?;
        writeln!(out, "{line}").map_err(|e| GraphError::io(path, e))?;
    }
    out.flush().map_err(|e| GraphError::io(path, e))
}

pub fn read_pairs(path: &Path) -> Result<Vec<MatchPair>> {
    let file = File::open(path).map_err(|e| GraphError::io(path, e))?;
    let reader = BufReader::new(file);
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| GraphError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let record: PairRecord = serde_json::from_str(&line).map_err(|e| GraphError::Parse {
            path: path.to_path_buf(),
            line: lineno,
            message: e.to_string(),
        })?;
        let pair = build_pair(record).map_err(|e| GraphError::InvalidRecord {
            line: lineno,
            message: e.to_string(),
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

fn build_pair(record: PairRecord) -> Result<MatchPair> {
    let data = record_to_graph(record.data)?;
    let query = record_to_graph(record.query)?;
    let mappings = record
        .mappings
        .into_iter()
        .map(Mapping::new)
        .collect::<Result<Vec<_>>>()?;
    MatchPair::new(data, query, mappings, record.truncated)
}

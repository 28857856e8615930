//! Graph data model for subgraph matching: labeled undirected graphs,
//! node-to-node mappings, matching matrices, dataset ingestion and the
//! on-disk pair interchange format.

mod error;
mod features;
mod graph;
mod matching;
mod pairs_io;
mod tudataset;

pub use error::GraphError;
pub use features::{encode_features, FeatureKind, FeatureMatrix, LabelVocabulary, NodeFeatures};
pub use graph::LabeledGraph;
pub use matching::{MatchPair, Mapping, MatchingMatrix};
pub use pairs_io::{read_pairs, write_pairs};
pub use tudataset::load_tudataset;

pub type Result<T> = std::result::Result<T, GraphError>;

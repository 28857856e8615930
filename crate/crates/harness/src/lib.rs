//! Experiment harness: the training loop, node-match evaluation metrics,
//! noise and size-imbalance studies, the exact-vs-model runtime benchmark
//! and the ablation protocol.

mod ablation;
mod bench;
mod eval;
mod metrics;
mod train;

pub use ablation::{run_ablation, AblationReport, AblationRow};
pub use bench::{bench_runtime, BenchAggregate, BenchOptions, BenchReport, BenchRow};
pub use eval::{evaluate, BucketRow, EvalOptions, EvalReport, PairEval};
pub use metrics::{f1_score, Scores};
pub use train::{mean_f1, train, EpochRecord, TrainConfig, TrainResult};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0} set is empty")]
    EmptySet(&'static str),

    #[error("training pair {index} is truncated; regenerate with a higher mapping cap or drop it")]
    TruncatedTrainingPair { index: usize },

    #[error("training step on pair {pair} failed: {source}")]
    TrainStep {
        pair: usize,
        #[source]
        source: Box<HarnessError>,
    },

    #[error("noise requires numerical node features")]
    NoiseRequiresNumerical,

    #[error("prediction covers {got} query nodes, expected {expected}")]
    PredictionLength { expected: usize, got: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Model(#[from] aednet::ModelError),

    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),

    #[error(transparent)]
    Graph(#[from] graph_core::GraphError),

    #[error(transparent)]
    Match(#[from] exact_match::MatchError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Format a float the way Rust's shortest round-trip `Display` does, so
/// reports are reproducible to the byte.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

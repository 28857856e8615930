use std::time::{Duration, Instant};

use aednet::{Model, PairInputs};
use exact_match::{enumerate_mappings, MatchMode, MatchOptions};
use graph_core::{LabelVocabulary, MatchPair};
use numerics::ParamStore;

use crate::{fmt_f64, HarnessError, Result};

/// Which matchers to time. Timings are taken sequentially, with no
/// worker parallelism, so rows are comparable.
pub struct BenchOptions<'a> {
    pub exact_all: bool,
    pub exact_first: bool,
    pub model: Option<(&'a Model, &'a ParamStore, Option<&'a LabelVocabulary>)>,
    pub deadline: Option<Duration>,
}

impl Default for BenchOptions<'_> {
    fn default() -> Self {
        BenchOptions {
            exact_all: true,
            exact_first: true,
            model: None,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub index: usize,
    pub query_size: usize,
    pub data_size: usize,
    pub data_edges: usize,
    pub exact_all_secs: Option<f64>,
    pub exact_all_mappings: Option<usize>,
    pub exact_all_recursions: Option<u64>,
    pub exact_all_timed_out: bool,
    pub exact_first_secs: Option<f64>,
    pub model_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchAggregate {
    pub exact_all_mean: Option<f64>,
    pub exact_all_median: Option<f64>,
    pub exact_first_mean: Option<f64>,
    pub exact_first_median: Option<f64>,
    pub model_mean: Option<f64>,
    pub model_median: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub aggregate: BenchAggregate,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut out = String::from(
            "pair,query_size,data_size,data_edges,exact_all_secs,exact_all_mappings,exact_all_recursions,exact_all_timed_out,exact_first_secs,model_secs\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.index,
                r.query_size,
                r.data_size,
                r.data_edges,
                opt(r.exact_all_secs),
                r.exact_all_mappings.map(|c| c.to_string()).unwrap_or_default(),
                r.exact_all_recursions.map(|c| c.to_string()).unwrap_or_default(),
                r.exact_all_timed_out,
                opt(r.exact_first_secs),
                opt(r.model_secs),
            ));
        }
        out.push_str(&format!(
            "aggregate,,,,{},,,,{},{}\n",
            opt(self.aggregate.exact_all_mean),
            opt(self.aggregate.exact_first_mean),
            opt(self.aggregate.model_mean),
        ));
        out
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "pairs": self.rows.len(),
            "exact_all_mean_secs": self.aggregate.exact_all_mean,
            "exact_all_median_secs": self.aggregate.exact_all_median,
            "exact_first_mean_secs": self.aggregate.exact_first_mean,
            "exact_first_median_secs": self.aggregate.exact_first_median,
            "model_mean_secs": self.aggregate.model_mean,
            "model_median_secs": self.aggregate.model_median,
        })
    }
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
    let mid = xs.len() / 2;
    Some(if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    })
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Wall-time the selected matchers on every pair.
pub fn bench_runtime(pairs: &[MatchPair], options: &BenchOptions) -> Result<BenchReport> {
    if pairs.is_empty() {
        return Err(HarnessError::EmptySet("benchmark"));
    }
    let mut rows = Vec::with_capacity(pairs.len());
    for (index, pair) in pairs.iter().enumerate() {
        let data = pair.data_graph();
        let query = pair.query_graph();
        let mut row = BenchRow {
            index,
            query_size: query.num_nodes(),
            data_size: data.num_nodes(),
            data_edges: data.num_edges(),
            exact_all_secs: None,
            exact_all_mappings: None,
            exact_all_recursions: None,
            exact_all_timed_out: false,
            exact_first_secs: None,
            model_secs: None,
        };

        if options.exact_all {
            let outcome = enumerate_mappings(
                data,
                query,
                &MatchOptions {
                    mode: MatchMode::All,
                    deadline: options.deadline,
                    ..Default::default()
                },
            )?;
            row.exact_all_secs = Some(outcome.stats.wall_time.as_secs_f64());
            row.exact_all_mappings = Some(outcome.mappings.len());
            row.exact_all_recursions = Some(outcome.stats.recursion_calls);
            row.exact_all_timed_out = outcome.timed_out;
        }
        if options.exact_first {
            let outcome = enumerate_mappings(
                data,
                query,
                &MatchOptions {
                    mode: MatchMode::First,
                    deadline: options.deadline,
                    ..Default::default()
                },
            )?;
            row.exact_first_secs = Some(outcome.stats.wall_time.as_secs_f64());
        }
        if let Some((model, store, vocabulary)) = options.model {
            let inputs = PairInputs::new(data, query, vocabulary, model.config().input_dim)?;
            let start = Instant::now();
            let _ = model.predict(store, &inputs)?;
            row.model_secs = Some(start.elapsed().as_secs_f64());
        }
        rows.push(row);
    }

    let collect = |f: fn(&BenchRow) -> Option<f64>| -> Vec<f64> {
        rows.iter().filter_map(f).collect()
    };
    let all_times = collect(|r| r.exact_all_secs);
    let first_times = collect(|r| r.exact_first_secs);
    let model_times = collect(|r| r.model_secs);
    let aggregate = BenchAggregate {
        exact_all_mean: mean(&all_times),
        exact_all_median: median(all_times),
        exact_first_mean: mean(&first_times),
        exact_first_median: median(first_times),
        model_mean: mean(&model_times),
        model_median: median(model_times),
    };
    Ok(BenchReport { rows, aggregate })
}

use std::time::Instant;

use aednet::{extract_top1, Model, PairInputs};
use graph_core::{FeatureKind, LabelVocabulary, MatchPair};
use numerics::ParamStore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::train::perturb_features;
use crate::{f1_score, fmt_f64, HarnessError, Result};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Zero-mean Gaussian noise added to both graphs' node features at
    /// evaluation time (the model itself was trained clean unless the
    /// trainer was told otherwise). Only meaningful for numerical
    /// features; a std of 0 is a no-op on any feature kind.
    pub noise_std: Option<f64>,
    pub noise_seed: u64,
    /// Bucket per-pair F1 by |Q| / |G| in steps of 0.1.
    pub by_ratio: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            noise_std: None,
            noise_seed: 0,
            by_ratio: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEval {
    pub index: usize,
    pub query_size: usize,
    pub data_size: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketRow {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub pairs: Vec<PairEval>,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    pub noise_std: Option<f64>,
    pub buckets: Option<Vec<BucketRow>>,
}

impl EvalReport {
    /// One row per pair plus an aggregate footer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,query_size,data_size,precision,recall,f1,wall_secs\n");
        for p in &self.pairs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.index,
                p.query_size,
                p.data_size,
                fmt_f64(p.precision),
                fmt_f64(p.recall),
                fmt_f64(p.f1),
                fmt_f64(p.wall_secs),
            ));
        }
        out.push_str(&format!(
            "aggregate,,,{},{},{},\n",
            fmt_f64(self.mean_precision),
            fmt_f64(self.mean_recall),
            fmt_f64(self.mean_f1),
        ));
        out
    }

    /// Deterministic view for run-to-run comparison: scores without times.
    pub fn to_csv_stable(&self) -> String {
        let mut out = String::from("pair,query_size,data_size,precision,recall,f1\n");
        for p in &self.pairs {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.index,
                p.query_size,
                p.data_size,
                fmt_f64(p.precision),
                fmt_f64(p.recall),
                fmt_f64(p.f1),
            ));
        }
        out
    }

    pub fn buckets_csv(&self) -> Option<String> {
        let buckets = self.buckets.as_ref()?;
        let mut out = String::from("ratio_lo,ratio_hi,count,mean_f1\n");
        for b in buckets {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(b.lo),
                fmt_f64(b.hi),
                b.count,
                fmt_f64(b.mean_f1),
            ));
        }
        Some(out)
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "pairs": self.pairs.len(),
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "mean_f1": self.mean_f1,
            "noise_std": self.noise_std,
        })
    }
}

/// Evaluate a trained model on a pair set, optionally under feature noise,
/// optionally bucketing by size ratio. Pairs are processed in parallel;
/// per-pair noise draws use independent streams so the report does not
/// depend on scheduling.
pub fn evaluate(
    pairs: &[MatchPair],
    model: &Model,
    store: &ParamStore,
    vocabulary: Option<&LabelVocabulary>,
    options: &EvalOptions,
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(HarnessError::EmptySet("evaluation"));
    }
    let noise_std = options.noise_std.unwrap_or(0.0);
    if noise_std < 0.0 || !noise_std.is_finite() {
        return Err(HarnessError::InvalidConfig(format!("noise std {noise_std}")));
    }
    if noise_std > 0.0 {
        let kind = pairs[0].data_graph().feature_kind();
        if kind != FeatureKind::Numerical {
            return Err(HarnessError::NoiseRequiresNumerical);
        }
    }

    let evals: Vec<PairEval> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, pair)| -> Result<PairEval> {
            let mut inputs = PairInputs::new(
                pair.data_graph(),
                pair.query_graph(),
                vocabulary,
                model.config().input_dim,
            )?;
            if noise_std > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(options.noise_seed);
                rng.set_stream(index as u64 + 1);
                inputs = perturb_features(&inputs, noise_std, &mut rng);
            }
            let start = Instant::now();
            let matrix = model.predict(store, &inputs)?;
            let wall_secs = start.elapsed().as_secs_f64();
            let prediction = extract_top1(&matrix);
            let scores = f1_score(&prediction, pair.matrix())?;
            Ok(PairEval {
                index,
                query_size: pair.query_graph().num_nodes(),
                data_size: pair.data_graph().num_nodes(),
                precision: scores.precision,
                recall: scores.recall,
                f1: scores.f1,
                wall_secs,
            })
        })
        .collect::<Result<_>>()?;

    let n = evals.len() as f64;
    let mean_precision = evals.iter().map(|e| e.precision).sum::<f64>() / n;
    let mean_recall = evals.iter().map(|e| e.recall).sum::<f64>() / n;
    let mean_f1 = evals.iter().map(|e| e.f1).sum::<f64>() / n;

    let buckets = options.by_ratio.then(|| {
        let mut rows: Vec<BucketRow> = (0..10)
            .map(|i| BucketRow {
                lo: i as f64 / 10.0,
                hi: (i + 1) as f64 / 10.0,
                count: 0,
                mean_f1: 0.0,
            })
            .collect();
        for e in &evals {
            let ratio = e.query_size as f64 / e.data_size as f64;
            let idx = ((ratio * 10.0).floor() as usize).min(9);
            rows[idx].count += 1;
            rows[idx].mean_f1 += e.f1;
        }
        for row in &mut rows {
            if row.count > 0 {
                row.mean_f1 /= row.count as f64;
            }
        }
        rows
    });

    Ok(EvalReport {
        pairs: evals,
        mean_precision,
        mean_recall,
        mean_f1,
        noise_std: options.noise_std,
        buckets,
    })
}

use graph_core::MatchingMatrix;

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Node-match precision / recall / F1 of a top-1 prediction against the
/// matching matrix: a predicted pair (i, j) is correct when any
/// ground-truth mapping sends i to j. One prediction per row against one
/// required match per row makes precision and recall coincide; both are
/// kept for report-format compatibility.
pub fn f1_score(prediction: &[usize], matrix: &MatchingMatrix) -> Result<Scores> {
    if prediction.len() != matrix.query_size() {
        return Err(HarnessError::PredictionLength {
            expected: matrix.query_size(),
            got: prediction.len(),
        });
    }
    let correct = prediction
        .iter()
        .enumerate()
        .filter(|&(i, &j)| j < matrix.data_size() && matrix.is_match(i, j))
        .count();
    let precision = correct as f64 / matrix.query_size() as f64;
    let recall = precision;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else if precision == recall {
        precision
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Scores {
        precision,
        recall,
        f1,
    })
}

//! Evaluation metrics for recovered components and detectors.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// `‖estimate − truth‖_F / max(‖truth‖_F, 1e-30)`.
pub fn relative_error(estimate: &Matrix, truth: &Matrix) -> Result<f64> {
    estimate.check_same_shape(truth)?;
    Ok((estimate - truth).frobenius() / truth.frobenius().max(1e-30))
}

/// F1 score between the supports `{|v| > threshold}` of two matrices.
/// Two empty supports agree perfectly and score 1.
pub fn anomaly_f1(estimate: &Matrix, truth: &Matrix, threshold: f64) -> Result<f64> {
    estimate.check_same_shape(truth)?;
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (e, t) in estimate.as_dmatrix().iter().zip(truth.as_dmatrix().iter()) {
        match (e.abs() > threshold, t.abs() > threshold) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fn_ == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
}

/// Area under the ROC curve via the Mann–Whitney statistic; tied scores
/// count one half. Infinite scores are allowed, NaN is not.
pub fn auc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::dims(scores.len(), positive.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument("AUC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // average 1-based ranks over tie groups
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            if positive[k] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

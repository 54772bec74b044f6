//! Confusion-matrix metrics, ROC/AUC, and the distinguishing-advantage
//! estimator that turns a classifier into a statistical distinguisher.

use crate::error::{Error, Result};
use crate::neural::mlp::{decide, forward, MlpParameters};
use crate::neural::train::LabeledDataset;

/// Confusion counts; class 1 is "cipher" (positive).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub true_neg: u64,
    pub false_pos: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_pos + self.true_neg) as f64 / self.total() as f64
    }
}

/// Metric values; zero-denominator cases are `None` ("undefined"), never NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationOutcome {
    pub confusion: ConfusionCounts,
    pub metrics: Metrics,
    /// Model scores in row order, for ROC construction downstream.
    pub scores: Vec<f64>,
}

/// Metrics from explicit confusion counts.
pub fn metrics_from_confusion(c: &ConfusionCounts) -> Metrics {
    let precision = if c.true_pos + c.false_pos > 0 {
        Some(c.true_pos as f64 / (c.true_pos + c.false_pos) as f64)
    } else {
        None
    };
    let recall = if c.true_pos + c.false_neg > 0 {
        Some(c.true_pos as f64 / (c.true_pos + c.false_neg) as f64)
    } else {
        None
    };
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Metrics {
        accuracy: c.accuracy(),
        precision,
        recall,
        f1,
    }
}

/// Scores every row and reports confusion counts plus derived metrics.
pub fn evaluate(params: &MlpParameters, data: &LabeledDataset) -> Result<EvaluationOutcome> {
    if data.is_empty() {
        return Err(Error::InvalidInput("cannot evaluate an empty set".into()));
    }
    let mut confusion = ConfusionCounts::default();
    let mut scores = Vec::with_capacity(data.len());
    for (x, &y) in data.features().iter().zip(data.labels()) {
        let p = forward(params, x)?;
        scores.push(p);
        match (decide(p), y) {
            (1, 1) => confusion.true_pos += 1,
            (0, 0) => confusion.true_neg += 1,
            (1, 0) => confusion.false_pos += 1,
            (0, 1) => confusion.false_neg += 1,
            _ => unreachable!(),
        }
    }
    Ok(EvaluationOutcome {
        confusion,
        metrics: metrics_from_confusion(&confusion),
        scores,
    })
}

/// ROC curve points from (0,0) to (1,1) with tied scores grouped, and the
/// trapezoidal AUC.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// (false-positive rate, true-positive rate) by decreasing threshold.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores vs {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y == 1).count() as f64;
    let negatives = labels.len() as f64 - positives;
    if positives == 0.0 || negatives == 0.0 {
        return Err(Error::InvalidInput(
            "ROC needs both classes present".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    // descending score; ties resolved by index only for a stable walk order
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

    let mut points = vec![(0.0, 0.0)];
    let mut auc = 0.0;
    let (mut tp, mut fp) = (0u64, 0u64);
    let (mut prev_fpr, mut prev_tpr) = (0.0f64, 0.0f64);

    let mut i = 0;
    while i < order.len() {
        // consume the whole tied-score group before emitting a point
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let tpr = tp as f64 / positives;
        let fpr = fp as f64 / negatives;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        points.push((fpr, tpr));
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    Ok(RocCurve { points, auc })
}

/// Advantage estimate with the accuracy-excess epsilon and a 95% normal
/// confidence interval on the difference of acceptance proportions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageEstimate {
    pub adv: f64,
    pub epsilon: f64,
    pub confidence_interval: (f64, f64),
}

/// Empirical distinguishing advantage of the classifier between a
/// cipher-feature set and a uniform-feature set:
/// |Pr[decide=1 | cipher] - Pr[decide=1 | random]|.
///
/// Epsilon is balanced accuracy minus 1/2, so `adv = 2 * |epsilon|`
/// holds exactly on balanced evaluations.
pub fn advantage(
    params: &MlpParameters,
    cipher_set: &[Vec<f64>],
    random_set: &[Vec<f64>],
) -> Result<AdvantageEstimate> {
    if cipher_set.is_empty() || random_set.is_empty() {
        return Err(Error::InvalidInput(
            "advantage needs both sets non-empty".into(),
        ));
    }
    let accept_rate = |rows: &[Vec<f64>]| -> Result<f64> {
        let mut accepted = 0u64;
        for x in rows {
            if decide(forward(params, x)?) == 1 {
                accepted += 1;
            }
        }
        Ok(accepted as f64 / rows.len() as f64)
    };
    let p_cipher = accept_rate(cipher_set)?;
    let p_random = accept_rate(random_set)?;
    let diff = p_cipher - p_random;
    let adv = diff.abs();

    // balanced accuracy: mean of per-class accuracies
    let accuracy = (p_cipher + (1.0 - p_random)) / 2.0;
    let epsilon = accuracy - 0.5;

    let n_c = cipher_set.len() as f64;
    let n_r = random_set.len() as f64;
    let se = (p_cipher * (1.0 - p_cipher) / n_c + p_random * (1.0 - p_random) / n_r).sqrt();
    let lo = (adv - 1.96 * se).max(0.0);
    let hi = (adv + 1.96 * se).min(1.0);

    Ok(AdvantageEstimate {
        adv,
        epsilon,
        confidence_interval: (lo, hi),
    })
}

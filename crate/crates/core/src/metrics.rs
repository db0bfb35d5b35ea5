//! Confusion-matrix metrics, ROC/AUC, Cohen's kappa and threshold sweeps.
//! The positive class is always fraud (`true` / 1).

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-binary value at index {0}")]
    NonBinary(usize),
    #[error("empty confusion matrix")]
    EmptyMatrix,
    #[error("ROC needs both classes present")]
    SingleClass,
    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn from_labels(y_true: &[bool], y_pred: &[bool]) -> Result<Self, MetricsError> {
        if y_true.len() != y_pred.len() {
            return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
        }
        let mut m = ConfusionMatrix::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (true, true) => m.tp += 1,
                (false, true) => m.fp += 1,
                (false, false) => m.tn += 1,
                (true, false) => m.fn_ += 1,
            }
        }
        Ok(m)
    }
}

/// Confusion matrix from 0/1 integer vectors.
pub fn confusion(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix, MetricsError> {
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch(y_true.len(), y_pred.len()));
    }
    let to_bool = |v: &[u8]| -> Result<Vec<bool>, MetricsError> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| match x {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(MetricsError::NonBinary(i)),
            })
            .collect()
    };
    ConfusionMatrix::from_labels(&to_bool(y_true)?, &to_bool(y_pred)?)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    /// Metrics whose denominator was zero and were reported as 0.
    pub undefined: Vec<String>,
}

pub fn scalar_metrics(m: &ConfusionMatrix) -> Result<ScalarMetrics, MetricsError> {
    let total = m.total();
    if total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let mut undefined = Vec::new();
    let mut ratio = |num: usize, den: usize, name: &str| {
        if den == 0 {
            undefined.push(name.to_string());
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(m.tp, m.tp + m.fp, "precision");
    let recall = ratio(m.tp, m.tp + m.fn_, "recall");
    let specificity = ratio(m.tn, m.tn + m.fp, "specificity");
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        undefined.push("f1".into());
        0.0
    };
    Ok(ScalarMetrics {
        accuracy: (m.tp + m.tn) as f64 / total as f64,
        precision,
        recall,
        specificity,
        f1,
        undefined,
    })
}

/// κ = (p_o − p_e) / (1 − p_e); defined as 0 when p_e = 1.
pub fn cohen_kappa(m: &ConfusionMatrix) -> Result<f64, MetricsError> {
    let n = m.total();
    if n == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let n = n as f64;
    let p_o = (m.tp + m.tn) as f64 / n;
    let actual_pos = (m.tp + m.fn_) as f64;
    let actual_neg = (m.tn + m.fp) as f64;
    let pred_pos = (m.tp + m.fp) as f64;
    let pred_neg = (m.tn + m.fn_) as f64;
    let p_e = (actual_pos * pred_pos + actual_neg * pred_neg) / (n * n);
    if p_e >= 1.0 {
        return Ok(0.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve by sweeping distinct scores from high to low, one step per group
/// of tied scores, and its trapezoidal area.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<(Vec<RocPoint>, f64), MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), labels.len()));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MetricsError::NonFiniteScore(i));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricsError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        // Trapezoid in count space, normalized once at the end.
        auc += (fp - prev_fp) as f64 * (tp + prev_tp) as f64 / 2.0;
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
        });
    }
    Ok((points, auc / (n_pos as f64 * n_neg as f64)))
}

/// How a score is turned into a positive prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionRule {
    /// Positive iff score ≥ threshold (probability models).
    AtLeast,
    /// Positive iff score > threshold (reconstruction errors).
    Above,
}

impl DecisionRule {
    pub fn apply(self, score: f64, threshold: f64) -> bool {
        match self {
            DecisionRule::AtLeast => score >= threshold,
            DecisionRule::Above => score > threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Percentile the threshold was derived from, when the sweep is percentile-driven.
    pub percentile: Option<f64>,
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub threshold: f64,
    pub rule: DecisionRule,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub kappa: f64,
    pub undefined_metrics: Vec<String>,
    pub auc: f64,
    pub roc_points: Vec<RocPoint>,
    pub threshold_table: Option<Vec<SweepRow>>,
}

pub fn evaluate(
    scores: &[f64],
    labels: &[bool],
    threshold: f64,
    rule: DecisionRule,
) -> Result<EvaluationReport, MetricsError> {
    let (roc_points, auc) = roc_auc(scores, labels)?;
    let predictions: Vec<bool> = scores.iter().map(|&s| rule.apply(s, threshold)).collect();
    let confusion = ConfusionMatrix::from_labels(labels, &predictions)?;
    let m = scalar_metrics(&confusion)?;
    Ok(EvaluationReport {
        threshold,
        rule,
        confusion,
        accuracy: m.accuracy,
        precision: m.precision,
        recall: m.recall,
        specificity: m.specificity,
        f1: m.f1,
        kappa: cohen_kappa(&confusion)?,
        undefined_metrics: m.undefined,
        auc,
        roc_points,
        threshold_table: None,
    })
}

/// One metrics row per threshold.
pub fn threshold_sweep(
    scores: &[f64],
    labels: &[bool],
    thresholds: &[f64],
    rule: DecisionRule,
) -> Result<Vec<SweepRow>, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch(scores.len(), labels.len()));
    }
    thresholds
        .iter()
        .map(|&threshold| {
            let predictions: Vec<bool> = scores.iter().map(|&s| rule.apply(s, threshold)).collect();
            let m = scalar_metrics(&ConfusionMatrix::from_labels(labels, &predictions)?)?;
            Ok(SweepRow {
                percentile: None,
                threshold,
                precision: m.precision,
                recall: m.recall,
                specificity: m.specificity,
                f1: m.f1,
                accuracy: m.accuracy,
            })
        })
        .collect()
}

pub fn write_roc_csv<W: Write>(sink: W, points: &[RocPoint]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["fpr", "tpr"])?;
    for p in points {
        w.write_record([p.fpr.to_string(), p.tpr.to_string()])?;
    }
    w.flush()
}

pub fn write_sweep_csv<W: Write>(sink: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["threshold", "precision", "recall", "f1", "accuracy"])?;
    for r in rows {
        w.write_record([
            r.threshold.to_string(),
            r.precision.to_string(),
            r.recall.to_string(),
            r.f1.to_string(),
            r.accuracy.to_string(),
        ])?;
    }
    w.flush()
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FMeasure,
    GMean,
    Auc,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::FMeasure, Metric::GMean, Metric::Auc];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::FMeasure => "f_measure",
            Metric::GMean => "g_mean",
            Metric::Auc => "auc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub f_measure: f64,
    pub g_mean: f64,
    pub auc: f64,
}

impl Scores {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::FMeasure => self.f_measure,
            Metric::GMean => self.g_mean,
            Metric::Auc => self.auc,
        }
    }
}

fn class_counts(y: &[bool]) -> Result<(usize, usize)> {
    let pos = y.iter().filter(|&&v| v).count();
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidParameter("metrics need both classes in y_true".into()));
    }
    Ok((pos, neg))
}

/// F-measure, G-mean (positive = `true`) at `threshold`, and ROC AUC.
pub fn metrics(y: &[bool], scores: &[f64], threshold: f64) -> Result<Scores> {
    if y.len() != scores.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), actual: scores.len() });
    }
    let (pos, neg) = class_counts(y)?;
    let (mut tp, mut fp) = (0usize, 0usize);
    for (&yi, &s) in y.iter().zip(scores) {
        if s >= threshold {
            if yi {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let fnn = pos - tp;
    let tn = neg - fp;
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = tp as f64 / pos as f64;
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    let specificity = tn as f64 / (tn + fp) as f64;
    debug_assert_eq!(tp + fnn, pos);
    Ok(Scores { f_measure, g_mean: (recall * specificity).sqrt(), auc: auc(y, scores)? })
}

/// Probability that a random positive scores above a random negative, with
/// ties counted as one half. Computed from average ranks.
pub fn auc(y: &[bool], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = class_counts(y)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 share their average
        let avg = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += avg * order[i..=j].iter().filter(|&&k| y[k]).count() as f64;
        i = j + 1;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}

/// Area under the ROC curve by the trapezoidal rule over all distinct
/// score thresholds.
pub fn auc_trapezoid(y: &[bool], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = class_counts(y)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_tpr, mut prev_fpr) = (0.0, 0.0);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let tpr = tp as f64 / pos as f64;
        let fpr = fp as f64 / neg as f64;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    Ok(area)
}

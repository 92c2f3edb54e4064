//! Regression and ranking metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("predictions ({0}) and labels ({1}) differ in length")]
    LengthMismatch(usize, usize),
    #[error("no data points")]
    Empty,
    #[error("only one class present; ranking metric undefined")]
    SingleClass,
    #[error("binary labels must be 0 or 1")]
    NotBinary,
}

fn check(pred: &[f64], y: &[f64]) -> Result<(), MetricError> {
    if pred.len() != y.len() {
        return Err(MetricError::LengthMismatch(pred.len(), y.len()));
    }
    if pred.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

pub fn rmse(pred: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check(pred, y)?;
    Ok((pred
        .iter()
        .zip(y)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / y.len() as f64)
        .sqrt())
}

pub fn mae(pred: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check(pred, y)?;
    Ok(pred.iter().zip(y).map(|(p, t)| (p - t).abs()).sum::<f64>() / y.len() as f64)
}

/// Coefficient of determination. NaN when the labels are constant.
pub fn r2(pred: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check(pred, y)?;
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|t| (t - mean).powi(2)).sum();
    let ss_res: f64 = pred.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum();
    Ok(if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        f64::NAN
    })
}

fn binary(y: &[f64]) -> Result<(usize, usize), MetricError> {
    let mut pos = 0;
    for &t in y {
        match t {
            1.0 => pos += 1,
            0.0 => {}
            _ => return Err(MetricError::NotBinary),
        }
    }
    let neg = y.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(MetricError::SingleClass);
    }
    Ok((pos, neg))
}

/// Area under the ROC curve from the rank-sum statistic, ties sharing their
/// average rank.
pub fn roc_auc(scores: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check(scores, y)?;
    let (pos, neg) = binary(y)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg = (i + j + 2) as f64 / 2.0;
        rank_sum_pos += order[i..=j].iter().filter(|&&k| y[k] == 1.0).count() as f64 * avg;
        i = j + 1;
    }
    let u = rank_sum_pos - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos as f64 * neg as f64))
}

/// Average precision: Σ (Rₙ − Rₙ₋₁)·Pₙ over descending score thresholds,
/// tied scores forming one threshold.
pub fn average_precision(scores: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    check(scores, y)?;
    let (pos, _) = binary(y)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let (mut tp, mut seen, mut prev_recall, mut ap) = (0usize, 0usize, 0.0, 0.0);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        tp += order[i..=j].iter().filter(|&&k| y[k] == 1.0).count();
        seen += j - i + 1;
        let recall = tp as f64 / pos as f64;
        ap += (recall - prev_recall) * tp as f64 / seen as f64;
        prev_recall = recall;
        i = j + 1;
    }
    Ok(ap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherBetter,
    LowerBetter,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::HigherBetter => "higher_better",
            Orientation::LowerBetter => "lower_better",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "higher_better" => Some(Orientation::HigherBetter),
            "lower_better" => Some(Orientation::LowerBetter),
            _ => None,
        }
    }

    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::HigherBetter => a > b,
            Orientation::LowerBetter => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rmse,
    Mae,
    R2,
    RocAuc,
    AveragePrecision,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
            Metric::R2 => "r2",
            Metric::RocAuc => "roc_auc",
            Metric::AveragePrecision => "average_precision",
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Metric::Rmse | Metric::Mae => Orientation::LowerBetter,
            _ => Orientation::HigherBetter,
        }
    }

    pub fn compute(self, pred: &[f64], y: &[f64]) -> Result<f64, MetricError> {
        match self {
            Metric::Rmse => rmse(pred, y),
            Metric::Mae => mae(pred, y),
            Metric::R2 => r2(pred, y),
            Metric::RocAuc => roc_auc(pred, y),
            Metric::AveragePrecision => average_precision(pred, y),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_examples() {
        assert_eq!(rmse(&[2.0, 2.0], &[1.0, 3.0]), Ok(1.0));
        assert_eq!(mae(&[2.0, 2.0], &[1.0, 4.0]), Ok(1.5));
        assert_eq!(r2(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]), Ok(0.0));
        assert_eq!(r2(&[1.0, 2.0], &[1.0, 2.0]), Ok(1.0));
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert_eq!(rmse(&[], &[]), Err(MetricError::Empty));
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            roc_auc(&[0.1, 0.2, 0.8, 0.9], &[0.0, 0.0, 1.0, 1.0]),
            Ok(1.0)
        );
        assert_eq!(roc_auc(&[0.5; 4], &[0.0, 1.0, 0.0, 1.0]), Ok(0.5));
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.2, 0.1], &[0.0, 0.0, 1.0, 1.0]),
            Ok(0.0)
        );
        assert_eq!(
            roc_auc(&[0.1, 0.2], &[1.0, 1.0]),
            Err(MetricError::SingleClass)
        );
    }

    #[test]
    fn ap_examples() {
        assert_eq!(
            average_precision(&[0.9, 0.8, 0.1], &[1.0, 1.0, 0.0]),
            Ok(1.0)
        );
        // ranking: 1, 0, 1 → (1/2)·1 + (1/2)·(2/3)
        let ap = average_precision(&[0.9, 0.5, 0.1], &[1.0, 0.0, 1.0]).unwrap();
        assert!((ap - (0.5 + 1.0 / 3.0)).abs() < 1e-12);
        // all tied: one threshold at recall 1, precision = prevalence
        assert_eq!(
            average_precision(&[0.3; 4], &[1.0, 0.0, 0.0, 0.0]),
            Ok(0.25)
        );
    }
}

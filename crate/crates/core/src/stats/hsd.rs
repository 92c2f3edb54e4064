//! Tukey HSD winner sets, win aggregation and the cliff-consistency t-test.

use serde::{Deserialize, Serialize};

use super::distributions::{studentized_range_quantile, t_sf};
use super::metrics::Orientation;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsdResult {
    pub means: Vec<f64>,
    pub n: usize,
    pub df: u64,
    pub ms_within: f64,
    pub q_crit: f64,
    /// `significant[i][j]`: models i and j differ at the chosen level.
    pub significant: Vec<Vec<bool>>,
    pub best: usize,
    /// Indices of the best model and every model indistinguishable from it, ascending.
    pub winners: Vec<usize>,
}

/// All-pairs Tukey HSD over per-model replicate values.
///
/// Zero pooled variance separates any two models whose means differ at all.
pub fn tukey_hsd(
    groups: &[Vec<f64>],
    orientation: Orientation,
    alpha: f64,
) -> Result<HsdResult, StatsError> {
    let k = groups.len();
    if k < 2 {
        return Err(StatsError::Invalid(format!(
            "Tukey HSD needs at least 2 models, got {k}"
        )));
    }
    let n = groups[0].len();
    if groups.iter().any(|g| g.len() != n) {
        let counts: Vec<usize> = groups.iter().map(Vec::len).collect();
        return Err(StatsError::Invalid(format!(
            "unequal replicate counts {counts:?}"
        )));
    }
    if n < 2 {
        return Err(StatsError::Invalid(format!(
            "Tukey HSD needs at least 2 replicates, got {n}"
        )));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::Invalid("non-finite metric value".into()));
    }
    let means: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / n as f64)
        .collect();
    let ss: f64 = groups
        .iter()
        .zip(&means)
        .map(|(g, m)| g.iter().map(|v| (v - m).powi(2)).sum::<f64>())
        .sum();
    let df = (k * (n - 1)) as u64;
    let ms_within = ss / df as f64;
    let q_crit = studentized_range_quantile(alpha, k, df)?;
    let se = (ms_within / n as f64).sqrt();
    let significant: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let diff = (means[i] - means[j]).abs();
                    if se > 0.0 {
                        diff / se > q_crit
                    } else {
                        diff > 0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut best = 0;
    for i in 1..k {
        if orientation.better(means[i], means[best]) {
            best = i;
        }
    }
    let winners = (0..k)
        .filter(|&i| i == best || !significant[best][i])
        .collect();
    Ok(HsdResult {
        means,
        n,
        df,
        ms_within,
        q_crit,
        significant,
        best,
        winners,
    })
}

/// `round(100 · wins / total)` with halves rounded up; 0 when there are no benchmarks.
pub fn win_rate(wins: usize, total: usize) -> u32 {
    if total == 0 {
        return 0;
    }
    ((200 * wins + total) / (2 * total)) as u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinSummary {
    pub model: String,
    pub wins: usize,
    pub total: usize,
    pub rate: u32,
}

/// Counts, per model, the benchmarks whose winner set contains it.
pub fn aggregate_wins<S: AsRef<str>>(models: &[S], winner_sets: &[Vec<String>]) -> Vec<WinSummary> {
    let total = winner_sets.len();
    models
        .iter()
        .map(|m| {
            let m = m.as_ref();
            let wins = winner_sets
                .iter()
                .filter(|w| w.iter().any(|x| x == m))
                .count();
            WinSummary {
                model: m.to_string(),
                wins,
                total,
                rate: win_rate(wins, total),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CliffResult {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub t: f64,
    /// One-sided p-value for H₁: mean difference > 0.
    pub p: f64,
    pub consistent: bool,
}

/// One-sample, one-sided t-test on per-seed `rmse_cliff − rmse_noncliff`.
///
/// With zero spread: a zero mean gives `t = 0, p = 0.5` (consistent), a
/// positive mean `t = +∞, p = 0`, a negative mean `t = −∞, p = 1`.
pub fn cliff_consistency(diffs: &[f64], alpha: f64) -> Result<CliffResult, StatsError> {
    let n = diffs.len();
    if n < 2 {
        return Err(StatsError::Invalid(format!(
            "cliff test needs at least 2 differences, got {n}"
        )));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(StatsError::Invalid("non-finite cliff difference".into()));
    }
    // identical differences have zero spread exactly, not a rounding residue
    let (mean, sd) = if diffs.iter().all(|&d| d == diffs[0]) {
        (diffs[0], 0.0)
    } else {
        let mean = diffs.iter().sum::<f64>() / n as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var.sqrt())
    };
    let t = if sd > 0.0 {
        mean / (sd / (n as f64).sqrt())
    } else if mean > 0.0 {
        f64::INFINITY
    } else if mean < 0.0 {
        f64::NEG_INFINITY
    } else {
        0.0
    };
    let p = t_sf(t, (n - 1) as f64);
    Ok(CliffResult {
        n,
        mean,
        sd,
        t,
        p,
        consistent: p >= alpha,
    })
}

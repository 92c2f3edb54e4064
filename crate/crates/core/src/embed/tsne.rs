//! Exact t-SNE.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EmbedError;

/// Squared distances below this are raised to it, so duplicate points keep a
/// finite kernel.
pub const DISTANCE_FLOOR: f64 = 1e-12;
const P_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsneInit {
    Pca,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    pub momentum_switch: usize,
    pub init: TsneInit,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            momentum_initial: 0.5,
            momentum_final: 0.8,
            momentum_switch: 250,
            init: TsneInit::Pca,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    pub coords: Vec<[f64; 2]>,
    pub kl_initial: f64,
    pub kl_final: f64,
    /// Achieved perplexity of each conditional distribution.
    pub row_perplexity: Vec<f64>,
}

/// Row-major `n × n` squared Euclidean distances, floored off the diagonal.
pub fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let d: f64 = points[i]
                            .iter()
                            .zip(&points[j])
                            .map(|(a, b)| (a - b).powi(2))
                            .sum();
                        d.max(DISTANCE_FLOOR)
                    }
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Conditional distribution `p_{j|i}` for one row at precision `beta`, with its
/// entropy in nats.
fn row_distribution(d: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    let d_min = d
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    let mut z = 0.0;
    let mut weighted = 0.0;
    for (j, &dj) in d.iter().enumerate() {
        if j == i {
            out[j] = 0.0;
            continue;
        }
        let shifted = dj - d_min;
        let p = (-beta * shifted).exp();
        out[j] = p;
        z += p;
        weighted += p * shifted;
    }
    out.iter_mut().for_each(|p| *p /= z);
    z.ln() + beta * weighted / z
}

/// Calibrates each row so its entropy is `ln(perplexity)`, bisecting on `ln β`.
/// Returns the row-stochastic conditional matrix and each row's perplexity.
pub fn conditional_probabilities(d: &[f64], n: usize, perplexity: f64) -> (Vec<f64>, Vec<f64>) {
    let target = perplexity.ln();
    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = &d[i * n..(i + 1) * n];
            let mut p = vec![0.0; n];
            let (mut lo, mut hi) = (-100.0f64, 100.0f64);
            let mut h = 0.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                h = row_distribution(row, i, mid.exp(), &mut p);
                if (h - target).abs() < 1e-7 {
                    break;
                }
                // entropy falls as precision rises
                if h > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (p, h.exp())
        })
        .collect();
    let perp = rows.iter().map(|r| r.1).collect();
    (rows.into_iter().flat_map(|r| r.0).collect(), perp)
}

/// Symmetrized joint probabilities `(p_{j|i} + p_{i|j}) / 2n`.
pub fn joint_probabilities(points: &[Vec<f64>], perplexity: f64) -> (Vec<f64>, Vec<f64>) {
    let n = points.len();
    let d = squared_distances(points);
    let (cond, perp) = conditional_probabilities(&d, n, perplexity);
    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = (cond[i * n + j] + cond[j * n + i]) / (2.0 * n as f64);
        }
    }
    (p, perp)
}

/// Student-t affinities `(1 + |yᵢ − yⱼ|²)⁻¹` (zero diagonal) and their sum.
fn kernel(y: &[[f64; 2]]) -> (Vec<f64>, f64) {
    let n = y.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let (dx, dy) = (y[i][0] - y[j][0], y[i][1] - y[j][1]);
                        1.0 / (1.0 + dx * dx + dy * dy)
                    }
                })
                .collect()
        })
        .collect();
    let z: f64 = rows.iter().map(|r| r.iter().sum::<f64>()).sum();
    (rows.concat(), z)
}

/// `KL(P ‖ Q)` for the embedding `y`.
pub fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let (num, z) = kernel(y);
    p.iter()
        .zip(&num)
        .filter(|(&pij, _)| pij > 0.0)
        .map(|(&pij, &q)| pij * (pij / (q / z).max(P_FLOOR)).ln())
        .sum()
}

/// Top two principal-component scores via power iteration with deflation.
fn pca_2d(points: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let n = points.len();
    let dim = points[0].len();
    let mut mean = vec![0.0; dim];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p) {
            *m += v / n as f64;
        }
    }
    let x: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&mean).map(|(v, m)| v - m).collect())
        .collect();
    let mut axes: Vec<Vec<f64>> = Vec::new();
    for _ in 0..2 {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for _ in 0..500 {
            // v ← Xᵀ X v, then orthogonalize against earlier axes
            let xv: Vec<f64> = x
                .iter()
                .map(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum())
                .collect();
            let mut w = vec![0.0; dim];
            for (r, s) in x.iter().zip(&xv) {
                for (wk, rk) in w.iter_mut().zip(r) {
                    *wk += rk * s;
                }
            }
            for a in &axes {
                let dot: f64 = w.iter().zip(a).map(|(p, q)| p * q).sum();
                w.iter_mut().zip(a).for_each(|(p, q)| *p -= dot * q);
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            w.iter_mut().for_each(|x| *x /= norm);
            let change: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            v = w;
            if change < 1e-12 {
                break;
            }
        }
        axes.push(v);
    }
    x.iter()
        .map(|r| {
            let s = |a: &Vec<f64>| r.iter().zip(a).map(|(p, q)| p * q).sum::<f64>();
            [s(&axes[0]), s(&axes[1])]
        })
        .collect()
}

fn initial_coords(points: &[Vec<f64>], cfg: &TsneConfig) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = points.len();
    if cfg.init == TsneInit::Pca {
        let y = pca_2d(points, &mut rng);
        let mean = y.iter().map(|c| c[0]).sum::<f64>() / n as f64;
        let sd = (y.iter().map(|c| (c[0] - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        if sd > 0.0 && y.iter().all(|c| c[0].is_finite() && c[1].is_finite()) {
            let s = 1e-4 / sd;
            return y.iter().map(|c| [c[0] * s, c[1] * s]).collect();
        }
    }
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect()
}

pub fn tsne(points: &[Vec<f64>], cfg: &TsneConfig) -> Result<TsneResult, EmbedError> {
    let n = points.len();
    if n < 3 {
        return Err(EmbedError::Invalid(format!(
            "t-SNE needs at least 3 points, got {n}"
        )));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(EmbedError::Invalid(
            "points must share one non-zero dimension".into(),
        ));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EmbedError::Invalid("non-finite input coordinate".into()));
    }
    if !(cfg.perplexity > 1.0 && cfg.perplexity < n as f64) {
        return Err(EmbedError::Invalid(format!(
            "perplexity {} must lie in (1, {n})",
            cfg.perplexity
        )));
    }
    let (p, row_perplexity) = joint_probabilities(points, cfg.perplexity);
    let mut y = initial_coords(points, cfg);
    let kl_initial = kl_divergence(&p, &y);
    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    for iter in 0..cfg.iterations {
        let exaggeration = if iter < cfg.exaggeration_iters {
            cfg.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < cfg.momentum_switch {
            cfg.momentum_initial
        } else {
            cfg.momentum_final
        };
        let (num, z) = kernel(&y);
        let grad: Vec<[f64; 2]> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut g = [0.0; 2];
                for j in 0..n {
                    let w = num[i * n + j];
                    let m = (exaggeration * p[i * n + j] - w / z) * w;
                    g[0] += m * (y[i][0] - y[j][0]);
                    g[1] += m * (y[i][1] - y[j][1]);
                }
                [4.0 * g[0], 4.0 * g[1]]
            })
            .collect();
        for i in 0..n {
            for k in 0..2 {
                gains[i][k] = if grad[i][k] * update[i][k] < 0.0 {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(0.01)
                };
                update[i][k] =
                    momentum * update[i][k] - cfg.learning_rate * gains[i][k] * grad[i][k];
                y[i][k] += update[i][k];
            }
        }
        for k in 0..2 {
            let mean = y.iter().map(|c| c[k]).sum::<f64>() / n as f64;
            y.iter_mut().for_each(|c| c[k] -= mean);
        }
        if y.iter().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(EmbedError::NonFinite(format!(
                "t-SNE diverged at iteration {iter}"
            )));
        }
    }
    let kl_final = kl_divergence(&p, &y);
    Ok(TsneResult {
        coords: y,
        kl_initial,
        kl_final,
        row_perplexity,
    })
}

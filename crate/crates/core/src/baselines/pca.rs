//! Principal components via cyclic Jacobi rotations on the covariance matrix.

use serde::{Deserialize, Serialize};

use super::BaselineError;

/// Eigenvalues (descending) and matching unit eigenvectors (as columns of a
/// row-major `n × n` matrix) of a symmetric matrix.
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n, "matrix must be n × n");
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + new] = v[k * n + old];
        }
    }
    (values, vectors)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub n_features: usize,
    pub k: usize,
    pub means: Vec<f64>,
    /// `n_features × k`, row-major; column j is the j-th principal axis.
    pub components: Vec<f64>,
    /// Covariance eigenvalues, descending, all of them.
    pub eigenvalues: Vec<f64>,
    /// Explained-variance ratio of every component, descending.
    pub explained_ratio: Vec<f64>,
    pub variance_threshold: f64,
}

/// Fits PCA on row-major `rows × n_features` data, keeping the fewest
/// components whose cumulative explained variance reaches `variance_threshold`.
pub fn fit_pca(
    data: &[f64],
    n_features: usize,
    variance_threshold: f64,
) -> Result<PcaModel, BaselineError> {
    let rows = data.len().checked_div(n_features).unwrap_or(0);
    if rows < 2 {
        return Err(BaselineError::Degenerate(format!(
            "PCA needs at least 2 rows, got {rows}"
        )));
    }
    let n = n_features;
    let mut means = vec![0.0; n];
    for r in 0..rows {
        for c in 0..n {
            means[c] += data[r * n + c];
        }
    }
    means.iter_mut().for_each(|m| *m /= rows as f64);
    let mut cov = vec![0.0; n * n];
    for r in 0..rows {
        let row = &data[r * n..(r + 1) * n];
        for i in 0..n {
            let di = row[i] - means[i];
            for j in i..n {
                cov[i * n + j] += di * (row[j] - means[j]);
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let v = cov[i * n + j] / rows as f64;
            cov[i * n + j] = v;
            cov[j * n + i] = v;
        }
    }
    let total: f64 = (0..n).map(|i| cov[i * n + i]).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(BaselineError::Degenerate(
            "all input columns are constant".into(),
        ));
    }
    let (eigenvalues, vectors) = jacobi_eigen(&cov, n);
    let eigenvalues: Vec<f64> = eigenvalues.into_iter().map(|e| e.max(0.0)).collect();
    let explained_ratio: Vec<f64> = eigenvalues.iter().map(|e| e / total).collect();
    let mut cum = 0.0;
    let mut k = n;
    for (i, r) in explained_ratio.iter().enumerate() {
        cum += r;
        if cum >= variance_threshold - 1e-12 {
            k = i + 1;
            break;
        }
    }
    let mut components = vec![0.0; n * k];
    for row in 0..n {
        components[row * k..(row + 1) * k].copy_from_slice(&vectors[row * n..row * n + k]);
    }
    Ok(PcaModel {
        n_features: n,
        k,
        means,
        components,
        eigenvalues,
        explained_ratio,
        variance_threshold,
    })
}

impl PcaModel {
    /// Projects row-major data onto the kept components, `rows × k`.
    pub fn project(&self, data: &[f64]) -> Vec<f64> {
        let (n, k) = (self.n_features, self.k);
        let rows = data.len() / n;
        let mut out = vec![0.0; rows * k];
        for r in 0..rows {
            for c in 0..n {
                let x = data[r * n + c] - self.means[c];
                if x == 0.0 {
                    continue;
                }
                for j in 0..k {
                    out[r * k + j] += x * self.components[c * k + j];
                }
            }
        }
        out
    }

    /// Maps projected scores back to feature space.
    pub fn reconstruct(&self, scores: &[f64]) -> Vec<f64> {
        let (n, k) = (self.n_features, self.k);
        let rows = scores.len() / k;
        let mut out = vec![0.0; rows * n];
        for r in 0..rows {
            for c in 0..n {
                let mut x = self.means[c];
                for j in 0..k {
                    x += scores[r * k + j] * self.components[c * k + j];
                }
                out[r * n + c] = x;
            }
        }
        out
    }

    pub fn captured_ratio(&self) -> f64 {
        self.explained_ratio[..self.k].iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn jacobi_diagonalizes() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 1.0];
        let (vals, vecs) = jacobi_eigen(&a, 3);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!((vals.iter().sum::<f64>() - 8.0).abs() < 1e-12);
        for j in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|k| a[i * 3 + k] * vecs[k * 3 + j]).sum();
                assert!((av - vals[j] * vecs[i * 3 + j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn line_in_3d_needs_one_component() {
        let data: Vec<f64> = (0..20)
            .flat_map(|t| {
                let t = t as f64;
                [t, 2.0 * t + 1.0, -t]
            })
            .collect();
        let p = fit_pca(&data, 3, 0.95).unwrap();
        assert_eq!(p.k, 1);
        assert!((p.explained_ratio[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isotropic_gaussian_splits_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..20000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let p = fit_pca(&data, 2, 0.95).unwrap();
        assert_eq!(p.k, 2);
        assert!(
            (p.explained_ratio[0] - 0.5).abs() < 0.03 && (p.explained_ratio[1] - 0.5).abs() < 0.03
        );
    }

    #[test]
    fn constant_input_is_degenerate() {
        assert!(fit_pca(&[1.0, 2.0, 1.0, 2.0], 2, 0.95).is_err());
        assert!(fit_pca(&[1.0, 2.0], 2, 0.95).is_err());
    }
}

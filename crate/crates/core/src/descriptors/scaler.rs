//! Per-column standardization followed by clipping at a fixed number of
//! standard deviations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::DescriptorMatrix;

pub const DEFAULT_CLIP_SIGMAS: f64 = 6.0;

#[derive(Debug, Error, PartialEq)]
pub enum ScalerError {
    #[error("need at least 2 rows to fit a scaler, got {0}")]
    TooFewRows(usize),
    #[error("column names do not match the fitted scaler")]
    ColumnMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerStats {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    /// Population standard deviation over valid cells.
    pub std: Vec<f64>,
    pub clip_sigmas: f64,
    /// Zero variance or no valid cells. These columns are masked after scaling.
    pub constant: Vec<bool>,
}

impl ScalerStats {
    /// Maps a standardized value back to descriptor units.
    pub fn inverse(&self, col: usize, z: f64) -> f64 {
        self.mean[col] + z * self.std[col]
    }
}

pub fn fit_scaler(d: &DescriptorMatrix) -> Result<ScalerStats, ScalerError> {
    if d.n_rows() < 2 {
        return Err(ScalerError::TooFewRows(d.n_rows()));
    }
    let cols = d.n_cols();
    let mut mean = vec![0.0; cols];
    let mut std = vec![0.0; cols];
    let mut constant = vec![false; cols];
    for c in 0..cols {
        let vals: Vec<f64> = d.column_valid(c).collect();
        if vals.is_empty() {
            constant[c] = true;
            continue;
        }
        let n = vals.len() as f64;
        let mu = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
        mean[c] = mu;
        std[c] = var.sqrt();
        constant[c] = std[c] == 0.0;
    }
    Ok(ScalerStats {
        names: d.names().to_vec(),
        mean,
        std,
        clip_sigmas: DEFAULT_CLIP_SIGMAS,
        constant,
    })
}

pub fn apply_scaler(
    d: &DescriptorMatrix,
    s: &ScalerStats,
) -> Result<DescriptorMatrix, ScalerError> {
    if d.names() != s.names.as_slice() {
        return Err(ScalerError::ColumnMismatch);
    }
    let cols = d.n_cols();
    let bound = s.clip_sigmas;
    let mut values = Vec::with_capacity(d.values().len());
    let mut mask = Vec::with_capacity(d.values().len());
    for (i, (&x, &ok)) in d.values().iter().zip(d.mask()).enumerate() {
        let c = i % cols;
        if ok && !s.constant[c] {
            values.push(((x - s.mean[c]) / s.std[c]).clamp(-bound, bound));
            mask.push(true);
        } else {
            values.push(f64::NAN);
            mask.push(false);
        }
    }
    Ok(DescriptorMatrix::from_parts(
        d.names().to_vec(),
        values,
        mask,
        d.row_ids().to_vec(),
    ))
}

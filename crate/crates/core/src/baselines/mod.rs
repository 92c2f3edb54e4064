//! Descriptor-only baselines: a feed-forward network on standardized
//! descriptors, and the same network on PCA scores fitted either on a
//! separate corpus ("prefitted") or on the training set itself ("local").
//!
//! Masked descriptor cells become 0 after standardization, which is
//! column-mean imputation in raw units.

mod pca;

pub use pca::{fit_pca, jacobi_eigen, PcaModel};

use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{apply_scaler, fit_scaler, DescriptorMatrix, ScalerError, ScalerStats};
use crate::molgraph::Molecule;
use crate::tensor::{Mlp, ParamStore, Tape, Tensor, Var};
use crate::train::{
    fit_rows, map_outputs, read_container, supervised_split, task_targets, write_container,
    FinetuneConfig, History, RowModel, Task, TrainError,
};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Scaler(#[from] ScalerError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

pub const PCA_KIND: &str = "pca";

/// A scaler and PCA fitted together on one descriptor corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaBundle {
    pub scaler: ScalerStats,
    pub pca: PcaModel,
}

#[derive(Serialize, Deserialize)]
struct PcaBody {
    scaler: ScalerStats,
    n_features: usize,
    k: usize,
    eigenvalues: Vec<f64>,
    explained_ratio: Vec<f64>,
    variance_threshold: f64,
}

impl PcaBundle {
    /// Standardizes `raw`, imputes masked cells with 0 and fits PCA.
    pub fn fit(raw: &DescriptorMatrix, variance_threshold: f64) -> Result<Self, BaselineError> {
        let scaler = fit_scaler(raw)?;
        let data = standardized(raw, &scaler)?;
        let mut pca = fit_pca(&data, raw.n_cols(), variance_threshold)?;
        // stored as f32 in CHMC; round now so the in-memory and reloaded models agree
        for x in pca.components.iter_mut().chain(pca.means.iter_mut()) {
            *x = *x as f32 as f64;
        }
        Ok(PcaBundle { scaler, pca })
    }

    /// PCA scores of `raw`, `rows × k`.
    pub fn transform(&self, raw: &DescriptorMatrix) -> Result<Vec<f64>, BaselineError> {
        Ok(self.pca.project(&standardized(raw, &self.scaler)?))
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), TrainError> {
        let p = &self.pca;
        let body = PcaBody {
            scaler: self.scaler.clone(),
            n_features: p.n_features,
            k: p.k,
            eigenvalues: p.eigenvalues.clone(),
            explained_ratio: p.explained_ratio.clone(),
            variance_threshold: p.variance_threshold,
        };
        let comps = Tensor::matrix(p.n_features, p.k, p.components.clone())?;
        let means = Tensor::matrix(1, p.n_features, p.means.clone())?;
        write_container(
            w,
            PCA_KIND,
            &body,
            &[("components", &comps), ("means", &means)],
        )
    }

    pub fn read<R: Read>(r: R) -> Result<Self, TrainError> {
        let (body, tensors): (PcaBody, _) = read_container(r, PCA_KIND)?;
        let get = |name: &str| {
            tensors
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, t)| t.data().to_vec())
                .ok_or_else(|| TrainError::Format(format!("pca container lacks '{name}'")))
        };
        let pca = PcaModel {
            n_features: body.n_features,
            k: body.k,
            means: get("means")?,
            components: get("components")?,
            eigenvalues: body.eigenvalues,
            explained_ratio: body.explained_ratio,
            variance_threshold: body.variance_threshold,
        };
        Ok(PcaBundle {
            scaler: body.scaler,
            pca,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), TrainError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrainError> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Standardized, clipped, zero-imputed row-major values.
fn standardized(raw: &DescriptorMatrix, scaler: &ScalerStats) -> Result<Vec<f64>, BaselineError> {
    let z = apply_scaler(raw, scaler)?;
    Ok(z.values()
        .iter()
        .zip(z.mask())
        .map(|(&v, &ok)| if ok { v } else { 0.0 })
        .collect())
}

/// How descriptor rows are turned into network inputs.
#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// Standardized descriptors.
    None,
    /// PCA fitted elsewhere.
    Prefitted(Box<PcaBundle>),
    /// PCA fitted on the training rows.
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub hidden: Vec<usize>,
    pub variance_threshold: f64,
    pub train: FinetuneConfig,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            hidden: vec![1800, 1800],
            variance_threshold: 0.95,
            train: FinetuneConfig::default(),
        }
    }
}

/// An MLP over fixed descriptor-derived features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureModel {
    pub scaler: ScalerStats,
    pub pca: Option<PcaModel>,
    pub store: ParamStore,
    pub mlp: Mlp,
    pub task: Task,
    pub label_scale: (f64, f64),
}

struct Rows<'a> {
    store: ParamStore,
    mlp: &'a Mlp,
    features: &'a [f64],
    width: usize,
}

impl RowModel for Rows<'_> {
    fn store(&self) -> &ParamStore {
        &self.store
    }

    fn store_mut(&mut self) -> &mut ParamStore {
        &mut self.store
    }

    fn forward_rows(
        &self,
        tape: &mut Tape,
        params: &[Var],
        rows: &[usize],
    ) -> Result<Var, TrainError> {
        let w = self.width;
        let mut x = Vec::with_capacity(rows.len() * w);
        for &r in rows {
            x.extend_from_slice(&self.features[r * w..(r + 1) * w]);
        }
        let x = tape.constant(Tensor::matrix(rows.len(), w, x)?);
        Ok(self.mlp.forward(tape, params, x)?)
    }
}

impl FeatureModel {
    /// Fits on a raw (unstandardized) feature matrix aligned with `labels`.
    pub fn fit(
        raw: &DescriptorMatrix,
        labels: &[f64],
        projection: Projection,
        cfg: &BaselineConfig,
    ) -> Result<(Self, History), BaselineError> {
        if raw.n_rows() != labels.len() {
            return Err(TrainError::Data(format!(
                "{} feature rows but {} labels",
                raw.n_rows(),
                labels.len()
            ))
            .into());
        }
        let (train, val) = supervised_split(labels, &cfg.train)?;
        let (scaler, pca) = match projection {
            Projection::None => (fit_scaler(raw)?, None),
            Projection::Prefitted(b) => (b.scaler, Some(b.pca)),
            Projection::Local => {
                let b = PcaBundle::fit(raw, cfg.variance_threshold)?;
                (b.scaler, Some(b.pca))
            }
        };
        let mut features = standardized(raw, &scaler)?;
        let width = match &pca {
            Some(p) => {
                features = p.project(&features);
                p.k
            }
            None => raw.n_cols(),
        };
        let mut dims = vec![width];
        dims.extend(&cfg.hidden);
        dims.push(1);
        let mut store = ParamStore::new();
        let mlp = Mlp::new(
            &mut store,
            "mlp",
            &dims,
            &mut ChaCha8Rng::seed_from_u64(cfg.train.seed),
        );
        let (targets, label_scale) = task_targets(labels, &train, cfg.train.task);
        let mut rows = Rows {
            store,
            mlp: &mlp,
            features: &features,
            width,
        };
        let lr = cfg.train.lr_head;
        let history = fit_rows(
            &mut rows,
            &targets,
            &train,
            &val,
            &cfg.train.loop_config(cfg.train.seed),
            |_| lr,
        )?;
        let store = rows.store;
        Ok((
            FeatureModel {
                scaler,
                pca,
                store,
                mlp,
                task: cfg.train.task,
                label_scale,
            },
            history,
        ))
    }

    pub fn predict_features(&self, raw: &DescriptorMatrix) -> Result<Vec<f64>, BaselineError> {
        let mut features = standardized(raw, &self.scaler)?;
        let width = match &self.pca {
            Some(p) => {
                features = p.project(&features);
                p.k
            }
            None => raw.n_cols(),
        };
        let mut tape = Tape::new();
        let vars = self.store.bind_frozen(&mut tape);
        let x =
            tape.constant(Tensor::matrix(raw.n_rows(), width, features).map_err(TrainError::from)?);
        let y = self
            .mlp
            .forward(&mut tape, &vars, x)
            .map_err(TrainError::from)?;
        Ok(map_outputs(
            self.task,
            self.label_scale,
            tape.value(y).data().to_vec(),
        ))
    }

    pub fn predict(&self, mols: &[Molecule]) -> Result<Vec<f64>, BaselineError> {
        if mols.is_empty() {
            return Ok(Vec::new());
        }
        self.predict_features(&DescriptorMatrix::from_molecules(
            mols,
            &Vec::<String>::new(),
        ))
    }
}

/// Descriptor FNN on the canonical descriptors of `mols`.
pub fn descriptor_fnn_fit(
    mols: &[Molecule],
    labels: &[f64],
    cfg: &BaselineConfig,
) -> Result<(FeatureModel, History), BaselineError> {
    let raw = DescriptorMatrix::from_molecules(mols, &Vec::<String>::new());
    FeatureModel::fit(&raw, labels, Projection::None, cfg)
}

/// PCA+MLP on the canonical descriptors of `mols`; `projection` should be
/// [`Projection::Prefitted`] or [`Projection::Local`].
pub fn pcamlp_fit(
    mols: &[Molecule],
    labels: &[f64],
    projection: Projection,
    cfg: &BaselineConfig,
) -> Result<(FeatureModel, History), BaselineError> {
    let raw = DescriptorMatrix::from_molecules(mols, &Vec::<String>::new());
    FeatureModel::fit(&raw, labels, projection, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::toy_corpus;

    fn small_cfg(seed: u64) -> BaselineConfig {
        BaselineConfig {
            hidden: vec![32, 32],
            variance_threshold: 0.95,
            train: FinetuneConfig {
                epochs: 60,
                seed,
                ..Default::default()
            },
        }
    }

    #[test]
    fn pca_bundle_round_trip() {
        let mols: Vec<_> = toy_corpus(60, 2).into_iter().map(|x| x.1).collect();
        let raw = DescriptorMatrix::from_molecules(&mols, &Vec::<String>::new());
        let b = PcaBundle::fit(&raw, 0.95).unwrap();
        let mut buf = Vec::new();
        b.write(&mut buf).unwrap();
        let back = PcaBundle::read(buf.as_slice()).unwrap();
        assert_eq!(back, b);
        let mut again = Vec::new();
        back.write(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn prefitted_equals_local_on_same_data() {
        let mols: Vec<_> = toy_corpus(40, 3).into_iter().map(|x| x.1).collect();
        let raw = DescriptorMatrix::from_molecules(&mols, &Vec::<String>::new());
        let labels: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let cfg = BaselineConfig {
            train: FinetuneConfig {
                epochs: 1,
                ..Default::default()
            },
            ..small_cfg(1)
        };
        let bundle = PcaBundle::fit(&raw, 0.95).unwrap();
        let (a, _) =
            FeatureModel::fit(&raw, &labels, Projection::Prefitted(Box::new(bundle)), &cfg)
                .unwrap();
        let (b, _) = FeatureModel::fit(&raw, &labels, Projection::Local, &cfg).unwrap();
        assert_eq!(a.pca, b.pca);
        assert_eq!(
            a.predict_features(&raw).unwrap(),
            b.predict_features(&raw).unwrap()
        );
    }

    #[test]
    fn huge_unscaled_column_still_trains() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| vec![1e6 * i as f64, (i % 7) as f64])
            .collect();
        let raw = DescriptorMatrix::from_rows(vec!["big".into(), "small".into()], &rows).unwrap();
        let labels: Vec<f64> = (0..60).map(|i| i as f64 / 10.0).collect();
        let (m, h) = FeatureModel::fit(&raw, &labels, Projection::None, &small_cfg(0)).unwrap();
        assert!(h.best_val_loss().unwrap().is_finite());
        let pred = m.predict_features(&raw).unwrap();
        let rmse = (pred
            .iter()
            .zip(&labels)
            .map(|(p, y)| (p - y).powi(2))
            .sum::<f64>()
            / 60.0)
            .sqrt();
        assert!(rmse < 0.5, "{rmse}");
    }

    #[test]
    fn constant_labels_give_constant_predictions() {
        let mols: Vec<_> = toy_corpus(30, 4).into_iter().map(|x| x.1).collect();
        let (m, _) = descriptor_fnn_fit(&mols, &[2.5; 30], &small_cfg(0)).unwrap();
        let p = m.predict(&mols).unwrap();
        let rmse = (p.iter().map(|p| (p - 2.5).powi(2)).sum::<f64>() / p.len() as f64).sqrt();
        assert!(rmse < 0.1, "{rmse}");
    }
}

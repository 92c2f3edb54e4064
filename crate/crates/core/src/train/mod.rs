//! Pre-training on descriptor targets, fine-tuning on labeled data, and the
//! shared mini-batch loop with validation-based model selection.

mod checkpoint;
mod data;

pub use checkpoint::{
    read_container, write_container, Checkpoint, TensorMeta, TrainMetadata, CHMC_MAGIC,
    CHMC_VERSION, MPNN_KIND,
};
pub use data::{parse_labeled_csv, read_labeled_csv, LabeledRow, Split};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::{DescriptorMatrix, ScalerStats};
use crate::dmpnn::{featurize, BatchGraph, MolGraph, Mpnn, MpnnConfig, MpnnError};
use crate::molgraph::Molecule;
use crate::tensor::{sigmoid, Adam, ParamStore, Tape, Tensor, TensorError, Var};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("{0} training rows; at least {1} required")]
    TooFewRows(usize, usize),
    #[error("classification split has a single class after re-drawing")]
    SingleClass,
    #[error("binary labels must be 0 or 1, got {0}")]
    BadLabel(f64),
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Mpnn(#[from] MpnnError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    BinaryClassification,
}

/// A network the loop can train: parameters plus a forward pass over row indices.
pub trait RowModel {
    fn store(&self) -> &ParamStore;
    fn store_mut(&mut self) -> &mut ParamStore;
    /// Outputs for `rows`, shaped `rows.len() × width`.
    fn forward_rows(
        &self,
        tape: &mut Tape,
        params: &[Var],
        rows: &[usize],
    ) -> Result<Var, TrainError>;
}

/// Row-major training targets with a validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Targets {
    pub width: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    pub task: Task,
}

impl Targets {
    pub fn column(values: Vec<f64>, task: Task) -> Self {
        let mask = vec![true; values.len()];
        Targets {
            width: 1,
            values,
            mask,
            task,
        }
    }

    fn gather(&self, rows: &[usize]) -> (Tensor, Vec<bool>) {
        let w = self.width;
        let mut vals = Vec::with_capacity(rows.len() * w);
        let mut mask = Vec::with_capacity(rows.len() * w);
        for &r in rows {
            vals.extend_from_slice(&self.values[r * w..(r + 1) * w]);
            mask.extend_from_slice(&self.mask[r * w..(r + 1) * w]);
        }
        (
            Tensor::matrix(rows.len(), w, vals).expect("target shape"),
            mask,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub epochs: usize,
    pub batch_size: usize,
    /// Stop after this many epochs without validation improvement.
    pub patience: Option<usize>,
    /// Linear learning-rate warmup length.
    pub warmup_epochs: usize,
    /// Fraction of valid training cells dropped from the loss at each step.
    pub mask_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct History {
    /// Validation loss of the initial weights.
    pub initial_val_loss: Option<f64>,
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose weights were kept; 0 means the initial weights.
    pub best_epoch: usize,
    pub skipped_batches: usize,
}

impl History {
    pub fn best_val_loss(&self) -> Option<f64> {
        match self.best_epoch {
            0 => self.initial_val_loss,
            e => self.epochs[e - 1].val_loss,
        }
    }

    pub fn final_train_loss(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |r| r.train_loss)
    }
}

fn batch_loss(
    tape: &mut Tape,
    out: Var,
    target: &Tensor,
    mask: &[bool],
    task: Task,
) -> Result<Var, TensorError> {
    match task {
        Task::Regression => tape.mse_masked(out, target, mask),
        Task::BinaryClassification => tape.bce_with_logits(out, target, mask),
    }
}

/// Mean validation loss over all valid cells of `rows` (MSE or BCE).
pub fn evaluate_loss<M: RowModel>(
    model: &M,
    targets: &Targets,
    rows: &[usize],
    batch_size: usize,
) -> Result<Option<f64>, TrainError> {
    let mut total = 0.0;
    let mut count = 0usize;
    for chunk in rows.chunks(batch_size.max(1)) {
        let mut tape = Tape::new();
        let vars = model.store().bind_frozen(&mut tape);
        let out = model.forward_rows(&mut tape, &vars, chunk)?;
        let (target, mask) = targets.gather(chunk);
        let n = mask.iter().filter(|&&m| m).count();
        let loss = batch_loss(&mut tape, out, &target, &mask, targets.task)?;
        total += tape.value(loss).item()? * n as f64;
        count += n;
    }
    Ok((count > 0).then(|| total / count as f64))
}

/// Mini-batch Adam over `train` rows with model selection on `val` rows.
///
/// `lr(i)` gives the base learning rate of parameter `i`; it is scaled by a
/// linear warmup over the first `warmup_epochs`. The returned model holds the
/// weights of the best validation epoch (the last epoch when `val` is empty).
pub fn fit_rows<M: RowModel>(
    model: &mut M,
    targets: &Targets,
    train: &[usize],
    val: &[usize],
    cfg: &LoopConfig,
    lr: impl Fn(usize) -> f64,
) -> Result<History, TrainError> {
    if cfg.batch_size == 0 {
        return Err(TrainError::Config("batch_size must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&cfg.mask_fraction) {
        return Err(TrainError::Config(
            "mask_fraction must lie in [0, 1)".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(model.store().len());
    let mut history = History {
        initial_val_loss: evaluate_loss(model, targets, val, cfg.batch_size)?,
        ..History::default()
    };
    let mut best: (Option<f64>, ParamStore) = (history.initial_val_loss, model.store().clone());
    let batches_per_epoch = train.len().div_ceil(cfg.batch_size).max(1);
    let warmup_steps = cfg.warmup_epochs * batches_per_epoch;
    let mut step = 0usize;
    let mut order = train.to_vec();
    let mut since_best = 0usize;

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut n_batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let (target, mut mask) = targets.gather(chunk);
            if cfg.mask_fraction > 0.0 {
                for m in mask.iter_mut() {
                    if rng.random_bool(cfg.mask_fraction) {
                        *m = false;
                    }
                }
            }
            if !mask.iter().any(|&m| m) {
                history.skipped_batches += 1;
                continue;
            }
            let mut tape = Tape::new();
            let vars = model.store().bind(&mut tape);
            let out = model.forward_rows(&mut tape, &vars, chunk)?;
            let loss = batch_loss(&mut tape, out, &target, &mask, targets.task)?;
            let value = tape.value(loss).item()?;
            if !value.is_finite() {
                return Err(TrainError::NonFinite(format!("loss at epoch {epoch}")));
            }
            let mut grads = tape.backward(loss)?;
            let grads: Vec<Option<Tensor>> = vars.iter().map(|&v| grads.take(v)).collect();
            let scale = if warmup_steps == 0 {
                1.0
            } else {
                ((step + 1) as f64 / warmup_steps as f64).min(1.0)
            };
            adam.step(model.store_mut(), &grads, |i| lr(i) * scale)?;
            step += 1;
            loss_sum += value;
            n_batches += 1;
        }
        let train_loss = if n_batches > 0 {
            loss_sum / n_batches as f64
        } else {
            f64::NAN
        };
        let val_loss = evaluate_loss(model, targets, val, cfg.batch_size)?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });

        let improved = match (val_loss, best.0) {
            (Some(v), Some(b)) => v < b || history.best_epoch == 0,
            (Some(_), None) => true,
            (None, _) => true,
        };
        if improved {
            best = (val_loss, model.store().clone());
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if cfg.patience.is_some_and(|p| since_best >= p) {
                break;
            }
        }
    }
    *model.store_mut() = best.1;
    Ok(history)
}

/// Seeded split of `0..n` into (train, val) with `round(n·val_fraction)` (≥ 1) validation rows.
pub fn split_indices(n: usize, val_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_val = if val_fraction <= 0.0 || n < 2 {
        0
    } else {
        ((n as f64 * val_fraction).round() as usize).clamp(1, n - 1)
    };
    let val = idx.split_off(n - n_val);
    (idx, val)
}

/// D-MPNN over a pre-featurized set of molecules.
pub struct GraphModel<'a> {
    pub mpnn: Mpnn,
    pub graphs: &'a [MolGraph],
}

impl RowModel for GraphModel<'_> {
    fn store(&self) -> &ParamStore {
        self.mpnn.params()
    }

    fn store_mut(&mut self) -> &mut ParamStore {
        self.mpnn.params_mut()
    }

    fn forward_rows(
        &self,
        tape: &mut Tape,
        params: &[Var],
        rows: &[usize],
    ) -> Result<Var, TrainError> {
        let batch = BatchGraph::new(rows.iter().map(|&r| &self.graphs[r]));
        Ok(self.mpnn.forward(tape, params, &batch)?.output)
    }
}

pub fn featurize_all(mols: &[Molecule]) -> Vec<MolGraph> {
    mols.par_iter().map(featurize).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PretrainConfig {
    pub mpnn: MpnnConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// Fraction of valid target cells randomly excluded from each step's loss.
    pub mask_fraction: f64,
    /// Exclude invalid descriptor cells from the loss. When off, they are
    /// trained towards 0 (the standardized mean).
    pub validity_mask: bool,
    /// Apply `mask_fraction`. When off, every valid cell is used.
    pub random_mask: bool,
    /// Held-out fraction used for checkpoint selection and reported RMSE.
    pub val_fraction: f64,
    pub warmup_epochs: usize,
    pub seed: u64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig {
            mpnn: MpnnConfig::default(),
            epochs: 30,
            batch_size: 50,
            lr: 1e-3,
            mask_fraction: 0.15,
            validity_mask: true,
            random_mask: true,
            val_fraction: 0.1,
            warmup_epochs: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PretrainOutcome {
    pub checkpoint: Checkpoint,
    pub history: History,
    /// Held-out RMSE over valid standardized cells, per epoch (index 0 = initial weights).
    pub val_rmse: Vec<f64>,
}

/// Trains a D-MPNN to predict standardized descriptors.
pub fn pretrain(
    mols: &[Molecule],
    targets: &DescriptorMatrix,
    scaler: Option<&ScalerStats>,
    cfg: &PretrainConfig,
) -> Result<PretrainOutcome, TrainError> {
    if mols.len() != targets.n_rows() {
        return Err(TrainError::Data(format!(
            "{} molecules but {} descriptor rows",
            mols.len(),
            targets.n_rows()
        )));
    }
    let width = targets.n_cols();
    let mpnn_cfg = MpnnConfig {
        output_dim: width,
        ..cfg.mpnn
    };
    let mpnn = Mpnn::new(mpnn_cfg, cfg.seed)?;
    let graphs = featurize_all(mols);
    let (values, mask): (Vec<f64>, Vec<bool>) = targets
        .values()
        .iter()
        .zip(targets.mask())
        .map(|(&v, &ok)| match (ok, cfg.validity_mask) {
            (true, _) => (v, true),
            (false, true) => (0.0, false),
            (false, false) => (0.0, true),
        })
        .unzip();
    let t = Targets {
        width,
        values,
        mask,
        task: Task::Regression,
    };
    let (train, val) = split_indices(mols.len(), cfg.val_fraction, cfg.seed);
    let loop_cfg = LoopConfig {
        epochs: cfg.epochs,
        batch_size: cfg.batch_size,
        patience: None,
        warmup_epochs: cfg.warmup_epochs,
        mask_fraction: if cfg.random_mask {
            cfg.mask_fraction
        } else {
            0.0
        },
        seed: cfg.seed,
    };
    let mut model = GraphModel {
        mpnn,
        graphs: &graphs,
    };
    let lr = cfg.lr;
    let history = fit_rows(&mut model, &t, &train, &val, &loop_cfg, |_| lr)?;
    let mut val_rmse = vec![history.initial_val_loss.map_or(f64::NAN, f64::sqrt)];
    val_rmse.extend(
        history
            .epochs
            .iter()
            .map(|r| r.val_loss.map_or(f64::NAN, f64::sqrt)),
    );
    let checkpoint = Checkpoint {
        model: model.mpnn,
        descriptor_names: targets.names().to_vec(),
        scaler: scaler.cloned(),
        metadata: TrainMetadata {
            stage: if cfg.epochs == 0 {
                "init".into()
            } else {
                "pretrain".into()
            },
            seed: cfg.seed,
            epochs: history.epochs.len(),
            final_loss: history.best_val_loss().unwrap_or(f64::NAN),
            task: None,
            label_scale: None,
        },
    };
    Ok(PretrainOutcome {
        checkpoint,
        history,
        val_rmse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinetuneConfig {
    pub task: Task,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_head: f64,
    /// Message-passing learning rate; `None` means `lr_head / 10`.
    pub lr_mp: Option<f64>,
    pub val_fraction: f64,
    pub patience: usize,
    pub freeze_mp: bool,
    pub warmup_epochs: usize,
    /// Refuse to train on fewer rows than this.
    pub min_train_rows: usize,
    pub seed: u64,
}

impl Default for FinetuneConfig {
    fn default() -> Self {
        FinetuneConfig {
            task: Task::Regression,
            epochs: 100,
            batch_size: 32,
            lr_head: 1e-3,
            lr_mp: None,
            val_fraction: 0.1,
            patience: 10,
            freeze_mp: false,
            warmup_epochs: 2,
            min_train_rows: 10,
            seed: 0,
        }
    }
}

impl FinetuneConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.val_fraction > 0.0 && self.val_fraction < 0.5) {
            return Err(TrainError::Config(
                "val_fraction must lie in (0, 0.5)".into(),
            ));
        }
        if self.patience == 0 {
            return Err(TrainError::Config("patience must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }

    pub fn loop_config(&self, seed: u64) -> LoopConfig {
        LoopConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            patience: Some(self.patience),
            warmup_epochs: self.warmup_epochs,
            mask_fraction: 0.0,
            seed,
        }
    }
}

/// A single-output model ready for prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub mpnn: Mpnn,
    pub task: Task,
    /// Mean and standard deviation used to standardize regression labels.
    pub label_scale: (f64, f64),
}

impl FittedModel {
    /// Raw network outputs for `mols`.
    fn raw(&self, mols: &[Molecule]) -> Vec<f64> {
        mols.par_chunks(64)
            .flat_map_iter(|chunk| {
                let graphs: Vec<MolGraph> = chunk.iter().map(featurize).collect();
                self.mpnn
                    .predict_batch(&BatchGraph::new(&graphs))
                    .expect("model shapes are consistent")
                    .into_data()
            })
            .collect()
    }

    /// Un-standardized regression values or class-1 probabilities.
    pub fn predict(&self, mols: &[Molecule]) -> Vec<f64> {
        let raw = self.raw(mols);
        map_outputs(self.task, self.label_scale, raw)
    }

    pub fn to_checkpoint(&self, epochs: usize, final_loss: f64, seed: u64) -> Checkpoint {
        Checkpoint {
            model: self.mpnn.clone(),
            descriptor_names: Vec::new(),
            scaler: None,
            metadata: TrainMetadata {
                stage: "finetune".into(),
                seed,
                epochs,
                final_loss,
                task: Some(self.task),
                label_scale: Some(self.label_scale),
            },
        }
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self, TrainError> {
        let task = ck
            .metadata
            .task
            .ok_or_else(|| TrainError::Format("checkpoint is not a fine-tuned model".into()))?;
        if ck.model.config().output_dim != 1 {
            return Err(TrainError::Format(
                "fine-tuned model must have one output".into(),
            ));
        }
        Ok(FittedModel {
            mpnn: ck.model,
            task,
            label_scale: ck.metadata.label_scale.unwrap_or((0.0, 1.0)),
        })
    }
}

/// Maps raw single-output network values to task outputs.
pub fn map_outputs(task: Task, (mean, std): (f64, f64), raw: Vec<f64>) -> Vec<f64> {
    match task {
        Task::Regression => raw.into_iter().map(|z| mean + std * z).collect(),
        // clamp keeps probabilities strictly inside (0, 1) even for huge logits
        Task::BinaryClassification => raw
            .into_iter()
            .map(|z| sigmoid(z).clamp(f64::EPSILON, 1.0 - f64::EPSILON))
            .collect(),
    }
}

pub fn predict(model: &FittedModel, mols: &[Molecule]) -> Vec<f64> {
    model.predict(mols)
}

#[derive(Debug, Clone)]
pub struct FinetuneOutcome {
    pub model: FittedModel,
    pub history: History,
    pub train_rows: Vec<usize>,
    pub val_rows: Vec<usize>,
}

/// Mean and population standard deviation (1 when the values are constant).
pub fn label_scale(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        return (0.0, 1.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    (mean, if sd > 0.0 { sd } else { 1.0 })
}

/// Splits rows for supervised training, checking size and class balance.
/// Returns (train, val) row indices.
pub fn supervised_split(
    labels: &[f64],
    cfg: &FinetuneConfig,
) -> Result<(Vec<usize>, Vec<usize>), TrainError> {
    cfg.validate()?;
    if let Some(bad) = labels.iter().find(|y| !y.is_finite()) {
        return Err(TrainError::NonFinite(format!("label {bad}")));
    }
    if cfg.task == Task::BinaryClassification {
        if let Some(&bad) = labels.iter().find(|&&y| y != 0.0 && y != 1.0) {
            return Err(TrainError::BadLabel(bad));
        }
    }
    let both = |rows: &[usize]| {
        let pos = rows.iter().filter(|&&r| labels[r] == 1.0).count();
        pos > 0 && pos < rows.len()
    };
    for attempt in 0..2u64 {
        let (train, val) = split_indices(
            labels.len(),
            cfg.val_fraction,
            cfg.seed.wrapping_add(attempt),
        );
        if train.len() < cfg.min_train_rows {
            return Err(TrainError::TooFewRows(train.len(), cfg.min_train_rows));
        }
        if cfg.task == Task::Regression || (both(&train) && both(&val)) {
            return Ok((train, val));
        }
    }
    Err(TrainError::SingleClass)
}

/// Supervised targets for a single-output task, standardized on `train` rows
/// for regression.
pub fn task_targets(labels: &[f64], train: &[usize], task: Task) -> (Targets, (f64, f64)) {
    match task {
        Task::Regression => {
            let scale = label_scale(train.iter().map(|&r| labels[r]));
            let z = labels.iter().map(|y| (y - scale.0) / scale.1).collect();
            (Targets::column(z, task), scale)
        }
        Task::BinaryClassification => (Targets::column(labels.to_vec(), task), (0.0, 1.0)),
    }
}

/// Fine-tunes `base` (pre-trained or freshly initialized) on labeled molecules
/// with a new single-output head.
pub fn finetune(
    base: &Mpnn,
    mols: &[Molecule],
    labels: &[f64],
    cfg: &FinetuneConfig,
) -> Result<FinetuneOutcome, TrainError> {
    if mols.len() != labels.len() {
        return Err(TrainError::Data(format!(
            "{} molecules but {} labels",
            mols.len(),
            labels.len()
        )));
    }
    let (train, val) = supervised_split(labels, cfg)?;
    let (targets, scale) = task_targets(labels, &train, cfg.task);
    let graphs = featurize_all(mols);
    let mpnn = base.reset_head(1, cfg.seed)?;
    let lr_mp = if cfg.freeze_mp {
        0.0
    } else {
        cfg.lr_mp.unwrap_or(cfg.lr_head / 10.0)
    };
    let encoder: Vec<bool> = (0..mpnn.params().len())
        .map(|i| mpnn.is_encoder_param(i))
        .collect();
    let mut model = GraphModel {
        mpnn,
        graphs: &graphs,
    };
    let history = fit_rows(
        &mut model,
        &targets,
        &train,
        &val,
        &cfg.loop_config(cfg.seed),
        |i| {
            if encoder[i] {
                lr_mp
            } else {
                cfg.lr_head
            }
        },
    )?;
    Ok(FinetuneOutcome {
        model: FittedModel {
            mpnn: model.mpnn,
            task: cfg.task,
            label_scale: scale,
        },
        history,
        train_rows: train,
        val_rows: val,
    })
}

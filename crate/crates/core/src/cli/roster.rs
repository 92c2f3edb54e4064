//! Model roster for `benchmark`: which models to train on every benchmark.
//!
//! ```json
//! [
//!   {"id": "pretrained", "kind": "mpnn", "checkpoint": "base.chmc"},
//!   {"id": "scratch", "kind": "mpnn", "hidden_size": 64},
//!   {"id": "descriptor_fnn", "kind": "descriptor_fnn", "hidden": [256, 256]},
//!   {"id": "pcamlp", "kind": "pcamlp", "pca": "corpus.pca"}
//! ]
//! ```
//!
//! Relative paths resolve against the roster file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CliError, CliResult};
use crate::baselines::{descriptor_fnn_fit, pcamlp_fit, BaselineConfig, PcaBundle, Projection};
use crate::dmpnn::{Mpnn, MpnnConfig};
use crate::stats::{BenchmarkData, BoxError, ReplicateModel};
use crate::train::{finetune, Checkpoint, FinetuneConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RosterKind {
    /// Fine-tuned D-MPNN; from `checkpoint` when given, otherwise freshly initialized per seed.
    Mpnn,
    DescriptorFnn,
    /// PCA+MLP; PCA from `pca` when given, otherwise fitted on each training split.
    Pcamlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RosterEntry {
    pub id: String,
    pub kind: RosterKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ffn_layers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ffn_hidden: Option<usize>,
    /// Hidden widths of a baseline MLP.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_head: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_mp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub val_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patience: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freeze_mp: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup_epochs: Option<usize>,
}

impl RosterEntry {
    fn finetune_config(&self) -> FinetuneConfig {
        let d = FinetuneConfig::default();
        FinetuneConfig {
            epochs: self.epochs.unwrap_or(d.epochs),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            lr_head: self.lr_head.unwrap_or(d.lr_head),
            lr_mp: self.lr_mp.or(d.lr_mp),
            val_fraction: self.val_fraction.unwrap_or(d.val_fraction),
            patience: self.patience.unwrap_or(d.patience),
            freeze_mp: self.freeze_mp.unwrap_or(d.freeze_mp),
            warmup_epochs: self.warmup_epochs.unwrap_or(d.warmup_epochs),
            ..d
        }
    }

    fn mpnn_config(&self) -> MpnnConfig {
        let d = MpnnConfig::default();
        MpnnConfig {
            hidden_size: self.hidden_size.unwrap_or(d.hidden_size),
            depth: self.depth.unwrap_or(d.depth),
            ffn_layers: self.ffn_layers.unwrap_or(d.ffn_layers),
            ffn_hidden: self.ffn_hidden.unwrap_or(d.ffn_hidden),
            output_dim: 1,
        }
    }
}

pub fn parse_roster(text: &str) -> Result<Vec<RosterEntry>, String> {
    let entries: Vec<RosterEntry> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if entries.is_empty() {
        return Err("roster lists no models".into());
    }
    for (i, e) in entries.iter().enumerate() {
        if entries[..i].iter().any(|p| p.id == e.id) {
            return Err(format!("duplicate model id '{}'", e.id));
        }
        if e.kind != RosterKind::Mpnn && e.checkpoint.is_some() {
            return Err(format!(
                "model '{}': checkpoint only applies to kind mpnn",
                e.id
            ));
        }
        if e.kind != RosterKind::Pcamlp && e.pca.is_some() {
            return Err(format!("model '{}': pca only applies to kind pcamlp", e.id));
        }
    }
    Ok(entries)
}

/// A roster entry with its artifacts loaded.
pub(crate) struct LoadedModel {
    entry: RosterEntry,
    base: Option<Mpnn>,
    pca: Option<PcaBundle>,
}

pub(crate) fn load_roster(path: &Path) -> CliResult<Vec<LoadedModel>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let entries =
        parse_roster(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &PathBuf| {
        if p.is_absolute() {
            p.clone()
        } else {
            base_dir.join(p)
        }
    };
    entries
        .into_iter()
        .map(|entry| {
            entry
                .finetune_config()
                .validate()
                .map_err(|e| CliError::from(e).context(format!("model '{}'", entry.id)))?;
            let base = match &entry.checkpoint {
                Some(p) => {
                    let p = resolve(p);
                    Some(
                        Checkpoint::load(&p)
                            .map_err(|e| CliError::from(e).context(p.display()))?
                            .model,
                    )
                }
                None => None,
            };
            let pca = match &entry.pca {
                Some(p) => {
                    let p = resolve(p);
                    Some(PcaBundle::load(&p).map_err(|e| CliError::from(e).context(p.display()))?)
                }
                None => None,
            };
            Ok(LoadedModel { entry, base, pca })
        })
        .collect()
}

impl ReplicateModel for LoadedModel {
    fn id(&self) -> &str {
        &self.entry.id
    }

    fn fit_predict(&self, data: &BenchmarkData, seed: u64) -> Result<Vec<f64>, BoxError> {
        let train = FinetuneConfig {
            task: data.task,
            seed,
            ..self.entry.finetune_config()
        };
        match self.entry.kind {
            RosterKind::Mpnn => {
                let base = match &self.base {
                    Some(m) => m.clone(),
                    None => Mpnn::new(self.entry.mpnn_config(), seed)?,
                };
                let out = finetune(&base, &data.train_mols, &data.train_labels, &train)?;
                Ok(out.model.predict(&data.test_mols))
            }
            RosterKind::DescriptorFnn | RosterKind::Pcamlp => {
                let d = BaselineConfig::default();
                let cfg = BaselineConfig {
                    hidden: self.entry.hidden.clone().unwrap_or(d.hidden),
                    variance_threshold: self
                        .entry
                        .variance_threshold
                        .unwrap_or(d.variance_threshold),
                    train,
                };
                let (model, _) = if self.entry.kind == RosterKind::DescriptorFnn {
                    descriptor_fnn_fit(&data.train_mols, &data.train_labels, &cfg)?
                } else {
                    let projection = self
                        .pca
                        .clone()
                        .map_or(Projection::Local, |b| Projection::Prefitted(Box::new(b)));
                    pcamlp_fit(&data.train_mols, &data.train_labels, projection, &cfg)?
                };
                Ok(model.predict(&data.test_mols)?)
            }
        }
    }
}

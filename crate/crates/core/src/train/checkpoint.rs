//! The `CHMC` weight container.
//!
//! ```text
//! magic  b"CHMC"
//! u32    format version
//! u32    header byte length
//! header UTF-8 JSON: {"kind": ..., "tensors": [{"name", "shape"}...], ...kind-specific fields}
//! data   f32 little-endian, tensors in header order
//! ```
//!
//! All stored tensors are f32-exact (see [`ParamStore`]), so a load/save cycle
//! reproduces the file byte for byte.

use std::io::{Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Task, TrainError};
use crate::descriptors::ScalerStats;
use crate::dmpnn::{Mpnn, MpnnConfig};
use crate::tensor::{ParamStore, Tensor};

pub const CHMC_MAGIC: [u8; 4] = *b"CHMC";
pub const CHMC_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header<T> {
    kind: String,
    tensors: Vec<TensorMeta>,
    #[serde(flatten)]
    body: T,
}

/// Writes a container with a kind tag, a serializable header body and named tensors.
pub fn write_container<W: Write, T: Serialize>(
    mut w: W,
    kind: &str,
    body: &T,
    tensors: &[(&str, &Tensor)],
) -> Result<(), TrainError> {
    let header = Header {
        kind: kind.to_string(),
        tensors: tensors
            .iter()
            .map(|(n, t)| TensorMeta {
                name: n.to_string(),
                shape: t.shape().to_vec(),
            })
            .collect(),
        body,
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(&CHMC_MAGIC)?;
    w.write_all(&CHMC_VERSION.to_le_bytes())?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    let total: usize = tensors.iter().map(|(_, t)| t.len()).sum();
    let mut buf = Vec::with_capacity(total * 4);
    for (_, t) in tensors {
        for &x in t.data() {
            buf.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a container, checking the kind tag.
pub fn read_container<R: Read, T: DeserializeOwned>(
    mut r: R,
    expected_kind: &str,
) -> Result<(T, Vec<(String, Tensor)>), TrainError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != CHMC_MAGIC {
        return Err(TrainError::Format(format!(
            "bad magic {magic:?}, expected CHMC"
        )));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CHMC_VERSION {
        return Err(TrainError::Format(format!(
            "unsupported CHMC version {version}"
        )));
    }
    r.read_exact(&mut word)?;
    let mut json = vec![0u8; u32::from_le_bytes(word) as usize];
    r.read_exact(&mut json)?;
    let header: Header<T> = serde_json::from_slice(&json)?;
    if header.kind != expected_kind {
        return Err(TrainError::Format(format!(
            "container holds '{}', expected '{expected_kind}'",
            header.kind
        )));
    }
    let mut tensors = Vec::with_capacity(header.tensors.len());
    for meta in header.tensors {
        let n: usize = meta.shape.iter().product();
        let mut raw = vec![0u8; n * 4];
        r.read_exact(&mut raw)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        let t = Tensor::new(meta.shape, data).map_err(|e| TrainError::Format(e.to_string()))?;
        tensors.push((meta.name, t));
    }
    Ok((header.body, tensors))
}

/// Training provenance stored with the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMetadata {
    /// "init", "pretrain" or "finetune".
    pub stage: String,
    pub seed: u64,
    pub epochs: usize,
    pub final_loss: f64,
    /// Task of a fine-tuned model.
    pub task: Option<Task>,
    /// Train-split label mean and standard deviation of a regression model.
    pub label_scale: Option<(f64, f64)>,
}

/// A D-MPNN with its descriptor-target provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: Mpnn,
    pub descriptor_names: Vec<String>,
    pub scaler: Option<ScalerStats>,
    pub metadata: TrainMetadata,
}

#[derive(Serialize, Deserialize)]
struct MpnnBody {
    config: MpnnConfig,
    descriptor_names: Vec<String>,
    scaler: Option<ScalerStats>,
    metadata: TrainMetadata,
}

pub const MPNN_KIND: &str = "mpnn";

impl Checkpoint {
    pub fn write<W: Write>(&self, w: W) -> Result<(), TrainError> {
        let body = MpnnBody {
            config: *self.model.config(),
            descriptor_names: self.descriptor_names.clone(),
            scaler: self.scaler.clone(),
            metadata: self.metadata.clone(),
        };
        let store = self.model.params();
        let tensors: Vec<(&str, &Tensor)> = store
            .names()
            .iter()
            .map(String::as_str)
            .zip(store.tensors())
            .collect();
        write_container(w, MPNN_KIND, &body, &tensors)
    }

    pub fn read<R: Read>(r: R) -> Result<Self, TrainError> {
        let (body, tensors): (MpnnBody, _) = read_container(r, MPNN_KIND)?;
        let mut store = ParamStore::new();
        for (name, t) in tensors {
            store.add(name, t);
        }
        Ok(Checkpoint {
            model: Mpnn::from_params(body.config, store)?,
            descriptor_names: body.descriptor_names,
            scaler: body.scaler,
            metadata: body.metadata,
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

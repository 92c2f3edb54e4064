//! Labeled dataset CSV: header with `smiles`, `target` and an optional
//! `split` column holding `train` or `test`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::molgraph::{parse_smiles, Molecule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone)]
pub struct LabeledRow {
    pub smiles: String,
    pub molecule: Molecule,
    pub target: f64,
    pub split: Option<Split>,
    /// 1-based data line (the header is line 1).
    pub line: usize,
}

#[derive(Deserialize)]
struct Record {
    smiles: String,
    target: String,
    #[serde(default)]
    split: Option<String>,
}

pub fn read_labeled_csv(path: impl AsRef<Path>) -> Result<Vec<LabeledRow>, TrainError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_labeled_csv(&text).map_err(|e| match e {
        TrainError::Data(msg) => TrainError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_labeled_csv(text: &str) -> Result<Vec<LabeledRow>, TrainError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.deserialize::<Record>().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| TrainError::Data(format!("line {line}: {e}")))?;
        let molecule = parse_smiles(&rec.smiles)
            .map_err(|e| TrainError::Data(format!("line {line}: SMILES '{}': {e}", rec.smiles)))?;
        let target: f64 = rec.target.parse().map_err(|_| {
            TrainError::Data(format!(
                "line {line}: target '{}' is not a number",
                rec.target
            ))
        })?;
        if !target.is_finite() {
            return Err(TrainError::Data(format!(
                "line {line}: target is not finite"
            )));
        }
        let split = match rec.split.as_deref() {
            None | Some("") => None,
            Some("train") => Some(Split::Train),
            Some("test") => Some(Split::Test),
            Some(other) => {
                return Err(TrainError::Data(format!(
                    "line {line}: split '{other}' is not train or test"
                )))
            }
        };
        rows.push(LabeledRow {
            smiles: rec.smiles,
            molecule,
            target,
            split,
            line,
        });
    }
    Ok(rows)
}

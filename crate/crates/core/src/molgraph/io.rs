use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{parse_smiles, Molecule, SmilesError};

/// One parsed line of a SMILES corpus file.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub smiles: String,
    pub id: Option<String>,
    /// 1-based line number in the source file.
    pub line: usize,
    pub molecule: Molecule,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: cannot parse '{smiles}': {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        smiles: String,
        #[source]
        source: SmilesError,
    },
}

/// Reads a corpus: one SMILES per line, optionally followed by whitespace and an
/// identifier. Blank lines and `#` comment lines are skipped.
pub fn read_smiles_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, CorpusError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus_text(&text, path)
}

pub(crate) fn parse_corpus_text(text: &str, path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.splitn(2, char::is_whitespace);
        let smiles = fields.next().unwrap_or_default().to_string();
        let id = fields
            .next()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from);
        let molecule = parse_smiles(&smiles).map_err(|source| CorpusError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            smiles: smiles.clone(),
            source,
        })?;
        entries.push(CorpusEntry {
            smiles,
            id,
            line: i + 1,
            molecule,
        });
    }
    Ok(entries)
}
